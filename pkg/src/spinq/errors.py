"""Exception hierarchy. Every error carries a stable ``kind`` string for the CLI."""


class SpinqError(Exception):
    kind = "Error"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


def _make(name: str, base=SpinqError, doc: str = ""):
    cls = type(name, (base,), {"kind": name, "__doc__": doc})
    return cls


IndexOutOfRange = _make("IndexOutOfRange", doc="A variable, qudit or interaction index is out of range.")
HardConstraintPresent = _make(
    "HardConstraintPresent", doc="Energy requested for a model holding weight-only interactions."
)
TooLarge = _make("TooLarge", doc="Enumeration or dense storage cap exceeded.")
UnknownFamily = _make("UnknownFamily")
BadDimensions = _make("BadDimensions")
BadCouplingCount = _make("BadCouplingCount")
DimensionMismatch = _make("DimensionMismatch")
WrongFamily = _make("WrongFamily")
NotMergeable = _make("NotMergeable")
TargetTooLarge = _make("TargetTooLarge")
TooWide = _make("TooWide")
NonUnitaryRegime = _make("NonUnitaryRegime", doc="A gate is not proportional to a unitary.")
PeriodicUnsupported = _make("PeriodicUnsupported")
DegenerateRow = _make("DegenerateRow", doc="A fork array row has no fork.")
NotFoliated = _make("NotFoliated")
BadParameters = _make("BadParameters")
InvalidModel = _make("InvalidModel")
