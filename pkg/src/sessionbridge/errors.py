class CheckError(Exception):
    """A type or well-formedness failure; `code` names the failing condition."""
    code = "TypeError"

    def __init__(self, msg=""):
        super().__init__(f"{self.code}: {msg}" if msg else self.code)
        self.msg = msg


def _make(code, base=CheckError):
    return type(code, (base,), {"code": code})


UnboundVariable = _make("UnboundVariable")
AnnotationMismatch = _make("AnnotationMismatch")
AnnotationMissing = _make("AnnotationMissing")
NotAChannelName = _make("NotAChannelName")
ChannelNotInSigma = _make("ChannelNotInΣ")
SessionMismatch = _make("SessionMismatch")
IdentityMismatch = _make("IdentityMismatch")
IllFormedSigma = _make("IllFormedΣ")
UnbalancedChannel = _make("UnbalancedChannel")
UnclosedChannel = _make("UnclosedChannel")
TypeMismatch = _make("TypeMismatch")
LinearViolation = _make("LinearViolation")
UnrViolation = _make("UnrViolation")
RowClash = _make("RowClash")
FieldMissing = _make("FieldMissing")
EffectMismatch = _make("EffectMismatch")
TagClash = _make("TagClash")


class TranslationError(Exception):
    code = "TranslationError"


class RecordNotSupported(TranslationError):
    code = "RecordNotSupported"


class NotInANF(TranslationError):
    code = "NotInANF"


class NotSupported(TranslationError):
    code = "NotSupported"


class MissingDerivationNode(TranslationError):
    code = "MissingDerivationNode"


class ParseError(Exception):
    def __init__(self, msg, line=0, col=0):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col = line, col
