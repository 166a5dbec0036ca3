"""Exception hierarchy shared by every module."""


class StablabError(Exception):
    pass


class ParseError(StablabError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptySft(StablabError):
    """The subshift has no configurations."""


class NotEssential(StablabError, ValueError):
    pass


class BoundTooSmall(StablabError):
    def __init__(self, bound: int, required: int):
        self.bound = bound
        self.required = required
        super().__init__(f"bound {bound} too small to certify the period set; need at least {required}")


class NotRealizable(StablabError):
    pass


class NotCertified(StablabError):
    """A result exists in principle but cannot be put in closed form."""


class PreconditionError(StablabError, ValueError):
    pass
