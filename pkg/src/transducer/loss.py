"""
RNN-T loss
Log-space forward/backward recursion with analytic gradients, plus a path-enumeration oracle
"""
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import ShapeError, TargetError
from src.numkernel import F64, PrecisionPolicy, log_softmax
from src.transducer.config import BLANK_ID
from src.transducer.joiner import JoinerParams, joint_lattice
from src.transducer.predictor import check_tokens

MAX_BRUTEFORCE_FRAMES = 6
MAX_BRUTEFORCE_TOKENS = 4


@dataclass(frozen=True)
class RnntLattice:
    """
    Joiner outputs over the T' x (U + 1) grid, vocabulary last (blank at index 0)

    Stored in the policy's compute dtype.
    """
    logits: np.ndarray
    policy: PrecisionPolicy = F64

    def __post_init__(self):
        logits = np.asarray(self.logits)
        if logits.ndim != 3:
            raise ShapeError(f"lattice logits must be T' x (U + 1) x V, got shape {logits.shape}")
        if logits.shape[0] < 1 or logits.shape[1] < 1 or logits.shape[2] < 2:
            raise ShapeError(f"lattice needs T' >= 1, U + 1 >= 1 and V >= 2, got shape {logits.shape}")
        object.__setattr__(self, "logits", self.policy.cast(logits))

    @classmethod
    def from_model(cls, enc, pred, joiner_params: JoinerParams,
                   policy: PrecisionPolicy = F64) -> "RnntLattice":
        return cls(joint_lattice(enc, pred, joiner_params, policy), policy)

    @property
    def T(self) -> int:
        return self.logits.shape[0]

    @property
    def U(self) -> int:
        return self.logits.shape[1] - 1

    @property
    def V(self) -> int:
        return self.logits.shape[2]

    @cached_property
    def log_probs(self) -> np.ndarray:
        acc = self.policy.accumulate(self.logits)
        return self.policy.cast(log_softmax(acc, axis=-1))

    @property
    def storage_bytes(self) -> int:
        """Bytes held by the logits and log-probability tensors"""
        return self.logits.nbytes + self.log_probs.nbytes


@dataclass(frozen=True)
class TransducerLossResult:
    neg_log_likelihood: float
    grad_logits: np.ndarray
    alphas: Optional[np.ndarray] = None
    betas: Optional[np.ndarray] = None


def _arc_log_probs(lattice: RnntLattice, targets: Sequence[int],
                   policy: PrecisionPolicy) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    ids = check_tokens(targets, lattice.V, allow_blank=False)
    if ids.shape[0] != lattice.U:
        raise TargetError(f"{ids.shape[0]} targets given for a lattice with U={lattice.U}")
    lp = policy.accumulate(lattice.log_probs)
    blank = lp[:, :, BLANK_ID]
    emit = lp[:, np.arange(lattice.U), ids] if lattice.U else np.zeros((lattice.T, 0), dtype=lp.dtype)
    return lp, blank, emit


def _alphas(blank: np.ndarray, emit: np.ndarray) -> np.ndarray:
    T, U1 = blank.shape
    alpha = np.zeros((T, U1), dtype=blank.dtype)
    for t in range(T):
        for u in range(U1):
            if t == 0 and u == 0:
                continue
            if t == 0:
                alpha[t, u] = alpha[t, u - 1] + emit[t, u - 1]
            elif u == 0:
                alpha[t, u] = alpha[t - 1, u] + blank[t - 1, u]
            else:
                alpha[t, u] = np.logaddexp(alpha[t - 1, u] + blank[t - 1, u],
                                           alpha[t, u - 1] + emit[t, u - 1])
    return alpha


def _betas(blank: np.ndarray, emit: np.ndarray) -> np.ndarray:
    T, U1 = blank.shape
    beta = np.zeros((T, U1), dtype=blank.dtype)
    for t in range(T - 1, -1, -1):
        for u in range(U1 - 1, -1, -1):
            if t == T - 1 and u == U1 - 1:
                beta[t, u] = blank[t, u]
            elif t == T - 1:
                beta[t, u] = beta[t, u + 1] + emit[t, u]
            elif u == U1 - 1:
                beta[t, u] = beta[t + 1, u] + blank[t, u]
            else:
                beta[t, u] = np.logaddexp(beta[t + 1, u] + blank[t, u],
                                          beta[t, u + 1] + emit[t, u])
    return beta


def rnnt_loss(lattice: RnntLattice, targets: Sequence[int],
              precision: Optional[PrecisionPolicy] = None) -> TransducerLossResult:
    """
    Negative log-likelihood of targets summed over all alignments, with d(nll)/d(logits)

    Args:
        lattice: joiner logits for one utterance
        targets: U non-blank token ids
        precision: overrides the lattice's policy for the recursions

    Returns:
        TransducerLossResult with the per-utterance nll (not length-normalised)

    Raises:
        TargetError: If targets contain blank, are out of range, or do not have length U
    """
    policy = precision if precision is not None else lattice.policy
    lp, blank, emit = _arc_log_probs(lattice, targets, policy)
    T, U1 = blank.shape
    alpha = _alphas(blank, emit)
    beta = _betas(blank, emit)
    log_likelihood = beta[0, 0]

    # d(-ll)/d(log p) on the two outgoing arcs of every node
    beta_after_blank = np.zeros_like(blank)
    beta_after_blank[:-1] = beta[1:]
    g_lp = np.zeros_like(lp)
    g_lp[:, :, BLANK_ID] = -np.exp(alpha + blank + beta_after_blank - log_likelihood)
    g_lp[T - 1, :-1, BLANK_ID] = 0.0
    if U1 > 1:
        ids = check_tokens(targets, lattice.V, allow_blank=False)
        emit_grad = -np.exp(alpha[:, :-1] + emit + beta[:, 1:] - log_likelihood)
        g_lp[:, np.arange(U1 - 1), ids] += emit_grad

    occupancy = np.exp(alpha + beta - log_likelihood)
    grad = np.exp(lp) * occupancy[:, :, None] + g_lp
    return TransducerLossResult(
        neg_log_likelihood=float(-log_likelihood),
        grad_logits=policy.cast(grad),
        alphas=alpha,
        betas=beta,
    )


def enumerate_alignments(T: int, U: int) -> Iterator[Tuple[bool, ...]]:
    """
    Every monotone blank/emit move sequence through a T x (U + 1) lattice

    Each sequence has T + U moves (True = emit); the last move is always the
    blank out of node (T - 1, U), so there are C(T - 1 + U, U) of them.
    """
    if T < 1 or U < 0:
        raise ShapeError(f"alignments need T >= 1 and U >= 0, got T={T}, U={U}")
    moves = T - 1 + U
    for emit_positions in itertools.combinations(range(moves), U):
        chosen = set(emit_positions)
        yield tuple(i in chosen for i in range(moves)) + (False,)


def rnnt_loss_bruteforce(lattice: RnntLattice, targets: Sequence[int]) -> float:
    """
    Exact -log of the summed probability of every alignment (float64)

    Raises:
        ShapeError: If the lattice exceeds MAX_BRUTEFORCE_FRAMES x MAX_BRUTEFORCE_TOKENS
    """
    if lattice.T > MAX_BRUTEFORCE_FRAMES or lattice.U > MAX_BRUTEFORCE_TOKENS:
        raise ShapeError(
            f"brute force is limited to T' <= {MAX_BRUTEFORCE_FRAMES} and U <= {MAX_BRUTEFORCE_TOKENS}, "
            f"got T'={lattice.T}, U={lattice.U}"
        )
    ids = check_tokens(targets, lattice.V, allow_blank=False)
    if ids.shape[0] != lattice.U:
        raise TargetError(f"{ids.shape[0]} targets given for a lattice with U={lattice.U}")
    lp = log_softmax(np.asarray(lattice.logits, dtype=np.float64), axis=-1)
    path_scores = []
    for path in enumerate_alignments(lattice.T, lattice.U):
        t = u = 0
        score = 0.0
        for is_emit in path:
            if is_emit:
                score += lp[t, u, ids[u]]
                u += 1
            else:
                score += lp[t, u, BLANK_ID]
                t += 1
        path_scores.append(score)
    return float(-np.logaddexp.reduce(np.array(path_scores)))
