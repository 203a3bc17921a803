class ProofkitError(Exception):
    """Base class for all errors raised by proofkit."""


class ParseError(ProofkitError):
    pass


class UnboundMetaVar(ProofkitError):
    pass


class IllFormedRule(ProofkitError):
    pass


class UnknownObject(ProofkitError):
    pass


class NameClash(ProofkitError):
    pass


class SignatureMismatch(ProofkitError):
    pass


class MissingMimicry(ProofkitError):
    def __init__(self, instance_id):
        super().__init__(f"no mimicking derivation for instance {instance_id!r}")
        self.instance_id = instance_id


class MimicryError(ProofkitError):
    """A mimicry table entry is not a valid rule-free mimicking derivation."""


class BudgetExceeded(ProofkitError):
    pass


class PreconditionViolation(ProofkitError):
    pass


class MarkerCollision(ProofkitError):
    pass


class ValidationError(ProofkitError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))
