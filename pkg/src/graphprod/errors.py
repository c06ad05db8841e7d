"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class GraphProductError(Exception):
    code = "error"


class InvalidSpecError(GraphProductError):
    code = "invalid-spec"


class ContextError(GraphProductError):
    code = "context"


class PreconditionError(GraphProductError):
    code = "precondition"


class NotFiniteOrderError(PreconditionError):
    code = "not-finite-order"


class RankDeficientError(GraphProductError):
    code = "rank-deficient"


class InfiniteGroupError(GraphProductError):
    code = "infinite-group"


class LimitExceededError(GraphProductError):
    code = "limit-exceeded"


class InvalidSentenceError(GraphProductError):
    code = "invalid-sentence"


class FormulaSyntaxError(GraphProductError):
    code = "syntax"

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
