"""
Multiply-add accounting
Kernels report scalar multiply-adds to the active counter, if any
"""
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional


@dataclass
class OpCounter:
    """Accumulates multiply-add counts per label"""
    multiply_adds: int = 0
    by_label: Dict[str, int] = field(default_factory=dict)

    def add(self, count: int, label: str = "matmul") -> None:
        self.multiply_adds += int(count)
        self.by_label[label] = self.by_label.get(label, 0) + int(count)

    def reset(self) -> None:
        self.multiply_adds = 0
        self.by_label.clear()


_active_counter: ContextVar[Optional[OpCounter]] = ContextVar("summix_op_counter", default=None)


def record_multiply_adds(count: int, label: str = "matmul") -> None:
    """Report work to the counter of the current context (no-op when none)"""
    counter = _active_counter.get()
    if counter is not None:
        counter.add(count, label)


@contextmanager
def counting_ops() -> Iterator[OpCounter]:
    """Count multiply-adds performed inside the with-block

    Example:
        with counting_ops() as counter:
            summary_mixing_offline(x, params)
        print(counter.multiply_adds)
    """
    counter = OpCounter()
    token = _active_counter.set(counter)
    try:
        yield counter
    finally:
        _active_counter.reset(token)
