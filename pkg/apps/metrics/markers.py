"""
Explicit marker for metric values that are mathematically undefined
"""
from typing import Union


class _Undefined:
    """Singleton standing in for a metric with a zero denominator or degenerate input"""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return 'UNDEFINED'

    def __str__(self) -> str:
        return 'undefined'

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()

MetricValue = Union[float, _Undefined]


def is_undefined(value) -> bool:
    return value is UNDEFINED


def ratio(numerator: float, denominator: float) -> MetricValue:
    return UNDEFINED if denominator == 0 else numerator / denominator
