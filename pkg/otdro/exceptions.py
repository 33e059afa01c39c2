from enum import Enum


class DroException(Exception):
    class ExceptionType(Enum):
        Domain = 0
        Configuration = 1
        Bracketing = 2
        Convergence = 3
        Verification = 4
        Data = 5
        Default = 6

    def __init__(
        self, message, err_type=ExceptionType.Default, diagnostics=None, log=None
    ):
        super().__init__(message)
        self.message = message
        self.err_type = err_type
        self.diagnostics = diagnostics if diagnostics else {}
        self.log = log

    def __str__(self):
        diagnostics = (
            "\n".join(
                "   - {} : {}".format(k, v) for k, v in self.diagnostics.items()
            )
            if self.diagnostics
            else ""
        )
        log_link = (
            "\nInspect log for more informations :\n   - {}".format(self.log)
            if self.log
            else ""
        )
        return "{} | {}\n{}{}".format(
            self.err_type.name, self.message, diagnostics, log_link
        ).rstrip()
