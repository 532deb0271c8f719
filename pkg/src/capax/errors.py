"""Exception hierarchy."""


class CapaxError(Exception):
    """Base class for all toolkit errors."""


class PartitionError(CapaxError, ValueError):
    pass


class GuardExceeded(CapaxError):
    """An enumeration or allocation would exceed its configured bound."""


class BoundaryViolation(CapaxError, ValueError):
    def __init__(self, endpoint: str, value):
        self.endpoint = endpoint
        self.value = value
        super().__init__(f"boundary condition violated at {endpoint}: value {value}")


class MonotonicityViolation(CapaxError, ValueError):
    def __init__(self, smaller: int, larger: int, v_small, v_large):
        self.smaller = smaller
        self.larger = larger
        super().__init__(
            f"monotonicity violated: mu({smaller:#b}) = {v_small} > mu({larger:#b}) = {v_large}"
        )


class InvalidProbabilities(CapaxError, ValueError):
    pass


class InvalidMobius(CapaxError, ValueError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"not the Moebius transform of a capacity; witness {witness}")


class NotIndifferent(CapaxError, ValueError):
    def __init__(self, block: int, first: int, second: int):
        self.block = block
        self.pair = (first, second)
        super().__init__(
            f"block {block:#b} is not a set of indifference: "
            f"subsets {first:#b} and {second:#b} take different values"
        )


class InvariantViolation(CapaxError, ValueError):
    pass


class NegativeScore(CapaxError, ValueError):
    pass


class ScoreOutOfRange(CapaxError, ValueError):
    pass


class NotSymmetric(CapaxError, ValueError):
    pass


class ZeroBlockMeasure(CapaxError, ValueError):
    def __init__(self, block_index: int, labels):
        self.block_index = block_index
        self.labels = list(labels)
        super().__init__(f"block {block_index} {self.labels} has zero measure")


class NotBelief(CapaxError, ValueError):
    pass
