"""
SummaryMixing cell
Linear-time token mixing: per-frame local transform f, an averaged summary of s
over the visible frames, and a combiner c over their concatenation.
"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from src.chunking.mask import VisibilityMask
from src.exceptions import ShapeError, StreamStateError
from src.numkernel import (
    Activation, DenseParams, PrecisionPolicy, dense, ensure_matrix, identity_dense, init_dense,
    record_multiply_adds,
)


@dataclass(frozen=True)
class SummaryMixingParams:
    """Local transform f, summary function s and combiner c"""
    local: DenseParams
    summary: DenseParams
    combiner: DenseParams

    def __post_init__(self):
        if self.local.d_in != self.summary.d_in:
            raise ShapeError(
                f"local and summary branches must share the input width, "
                f"got {self.local.d_in} and {self.summary.d_in}"
            )
        if self.combiner.d_in != self.local.d_out + self.summary.d_out:
            raise ShapeError(
                f"combiner input width {self.combiner.d_in} != "
                f"{self.local.d_out} + {self.summary.d_out}"
            )

    @property
    def d_in(self) -> int:
        return self.local.d_in

    @property
    def d_local(self) -> int:
        return self.local.d_out

    @property
    def d_summary(self) -> int:
        return self.summary.d_out

    @property
    def d_out(self) -> int:
        return self.combiner.d_out

    @property
    def nbytes(self) -> int:
        return self.local.nbytes + self.summary.nbytes + self.combiner.nbytes


def init_summary_mixing_params(rng: Optional[np.random.Generator], d_in: int, d_local: int,
                               d_summary: int, d_out: int, dtype=np.float32,
                               activation=Activation.GELU) -> SummaryMixingParams:
    """Random single-dense-layer branches and combiner (all zero when rng is None)"""
    return SummaryMixingParams(
        local=init_dense(rng, d_in, d_local, activation, dtype),
        summary=init_dense(rng, d_in, d_summary, activation, dtype),
        combiner=init_dense(rng, d_local + d_summary, d_out, activation, dtype),
    )


def linear_summary_mixing_params(dim: int, dtype=np.float64) -> SummaryMixingParams:
    """Identity f and s with a concatenating combiner: row t becomes [x_t | s_bar_t]"""
    return SummaryMixingParams(
        local=identity_dense(dim, dtype=dtype),
        summary=identity_dense(dim, dtype=dtype),
        combiner=identity_dense(2 * dim, dtype=dtype),
    )


def _policy_for(x: np.ndarray, policy: Optional[PrecisionPolicy]) -> PrecisionPolicy:
    return policy if policy is not None else PrecisionPolicy.for_array(x)


def _combine(local: np.ndarray, summaries: np.ndarray, p: SummaryMixingParams,
             policy: PrecisionPolicy) -> np.ndarray:
    joined = np.concatenate([local, summaries.astype(local.dtype, copy=False)], axis=1)
    return dense(joined, p.combiner, policy)


def summary_mixing_offline(X, p: SummaryMixingParams,
                           policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """
    Whole-sequence SummaryMixing: every frame uses the mean of s over all T frames

    Raises:
        ShapeError: If X is empty or its width does not match the parameters
    """
    X = ensure_matrix(X, "X")
    if X.shape[0] == 0:
        raise ShapeError("summary_mixing_offline needs at least one frame")
    policy = _policy_for(X, policy)
    local = dense(X, p.local, policy)
    s = dense(X, p.summary, policy)
    mean = s.sum(axis=0, dtype=policy.accumulate_dtype) / X.shape[0]
    record_multiply_adds(s.size, "summary")
    summaries = np.broadcast_to(mean.astype(policy.compute_dtype), s.shape)
    return _combine(local, summaries, p, policy)


def masked_summaries(S: np.ndarray, mask: VisibilityMask,
                     policy: PrecisionPolicy) -> np.ndarray:
    """
    Per-frame visible means of S (T x D''') using the chunk structure of the mask

    All frames of a chunk share one summary. Sums are formed per chunk, then
    accumulated over chunks (infinite left context) or over the left-context
    window (finite), so no T x T array is ever built.
    """
    T = S.shape[0]
    C = mask.chunk_size
    starts = np.arange(0, T, C)
    counts = np.diff(np.append(starts, T))
    chunk_sums = np.add.reduceat(S.astype(policy.accumulate_dtype, copy=False), starts, axis=0)
    record_multiply_adds(S.size, "summary")

    left = mask.left_context_chunks
    if left is None:
        visible_sums = np.cumsum(chunk_sums, axis=0)
        visible_counts = np.cumsum(counts)
    else:
        visible_sums = np.empty_like(chunk_sums)
        visible_counts = np.empty_like(counts)
        for k in range(len(starts)):
            lo = max(0, k - left)
            visible_sums[k] = chunk_sums[lo:k + 1].sum(axis=0)
            visible_counts[k] = counts[lo:k + 1].sum()
    means = visible_sums / visible_counts[:, None]
    return np.repeat(means.astype(policy.compute_dtype), counts, axis=0)


def summary_mixing_masked(X, mask: VisibilityMask, p: SummaryMixingParams,
                          policy: Optional[PrecisionPolicy] = None) -> np.ndarray:
    """
    SummaryMixing restricted to the visible frames of each time step

    s_bar_t = (1 / T_t) * sum_u m[t, u] * s(x_u);  h_t = c(f(x_t), s_bar_t)
    """
    X = ensure_matrix(X, "X")
    if X.shape[0] != mask.T:
        raise ShapeError(f"mask is for T={mask.T} frames but X has {X.shape[0]}")
    policy = _policy_for(X, policy)
    local = dense(X, p.local, policy)
    s = dense(X, p.summary, policy)
    return _combine(local, masked_summaries(s, mask, policy), p, policy)


@dataclass(frozen=True)
class SummaryState:
    """
    Streaming summary: sum and count of the currently visible frames

    Infinite left context keeps a compensated running sum. A finite left
    context keeps one (sum, count) partial per live chunk and re-forms the
    window sum from them, so evicted chunks leave no rounding residue.
    """
    running_sum: np.ndarray
    frame_count: int = 0
    compensation: Optional[np.ndarray] = None
    left_context_chunks: Optional[int] = None
    chunk_partials: Tuple[Tuple[np.ndarray, int], ...] = field(default_factory=tuple)

    @classmethod
    def initial(cls, d_summary: int, left_context_chunks: Optional[int] = None,
                dtype=np.float32) -> "SummaryState":
        zeros = np.zeros(d_summary, dtype=dtype)
        return cls(zeros, 0, zeros.copy(), left_context_chunks, ())

    @property
    def d_summary(self) -> int:
        return self.running_sum.shape[0]

    @property
    def visible_sum(self) -> np.ndarray:
        if self.compensation is None:
            return self.running_sum
        return self.running_sum + self.compensation

    @property
    def mean(self) -> np.ndarray:
        if self.frame_count == 0:
            raise StreamStateError("summary state has no frames yet")
        return self.visible_sum / self.frame_count

    @property
    def nbytes(self) -> int:
        total = self.running_sum.nbytes
        if self.compensation is not None:
            total += self.compensation.nbytes
        total += sum(partial.nbytes for partial, _ in self.chunk_partials)
        return total


def _neumaier_add(total: np.ndarray, compensation: np.ndarray, x: np.ndarray):
    new_total = total + x
    big = np.abs(total) >= np.abs(x)
    correction = np.where(big, (total - new_total) + x, (x - new_total) + total)
    return new_total, compensation + correction


def summary_mixing_step(chunk, state: SummaryState, p: SummaryMixingParams,
                        policy: Optional[PrecisionPolicy] = None) -> Tuple[np.ndarray, SummaryState]:
    """
    Process one streaming chunk

    Every frame of the chunk uses the summary over all visible frames up to
    the end of the chunk. Returns the chunk output and the updated state.

    Raises:
        StreamStateError: If the chunk is empty
    """
    chunk = ensure_matrix(chunk, "chunk")
    if chunk.shape[0] == 0:
        raise StreamStateError("summary_mixing_step received an empty chunk")
    if state.d_summary != p.d_summary:
        raise ShapeError(f"state width {state.d_summary} != summary width {p.d_summary}")
    policy = _policy_for(chunk, policy)
    acc = policy.accumulate_dtype
    local = dense(chunk, p.local, policy)
    s = dense(chunk, p.summary, policy)
    chunk_sum = s.sum(axis=0, dtype=acc)
    record_multiply_adds(s.size, "summary")
    n = chunk.shape[0]

    if state.left_context_chunks is None:
        compensation = state.compensation if state.compensation is not None else np.zeros_like(chunk_sum)
        total, compensation = _neumaier_add(state.running_sum.astype(acc, copy=False),
                                            compensation.astype(acc, copy=False), chunk_sum)
        new_state = SummaryState(total, state.frame_count + n, compensation, None, ())
    else:
        partials = (state.chunk_partials + ((chunk_sum, n),))[-(state.left_context_chunks + 1):]
        window_sum = np.stack([partial for partial, _ in partials]).sum(axis=0)
        window_count = sum(count for _, count in partials)
        new_state = SummaryState(window_sum, window_count, None, state.left_context_chunks, partials)

    mean = (new_state.visible_sum / new_state.frame_count).astype(policy.compute_dtype)
    out = _combine(local, np.broadcast_to(mean, s.shape), p, policy)
    return out, new_state
