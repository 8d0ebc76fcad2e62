# -*- coding: utf-8 -*-

__all__ = ['AcxError', 'InvalidDefinition', 'SchemaErrors', 'UnknownSort', 'ArityMismatch', 'DuplicateName',
           'UnboundVariable', 'UnknownRelation', 'UnknownQuery', 'UnknownCommand', 'SortMismatch',
           'RuleEmitsUnknownRelation', 'UntranslatableAtom', 'MissingCommandRule', 'MissingQueryRule',
           'DuplicateRule', 'NoActorDeclared', 'SignatureMismatch', 'UnknownTag', 'UnknownSimulation',
           'NoCanonicalData', 'UnknownId']


class AcxError(Exception):
    """
    Base error of the workbench.
    :param message: human readable message, names the offending declaration
    :param details: optional JSON-safe payload (e.g. a location inside a file)
    """
    exit_code = 2

    def __init__(self, message=None, details=None):
        self.message = message or self.__class__.__name__
        self.details = details
        super().__init__(self.message)

    def to_primitive(self):
        data = {'error': self.__class__.__name__, 'message': self.message}
        if self.details is not None:
            data['details'] = self.details
        return data


class InvalidDefinition(AcxError):
    """Structural error in a system/mapping/config document."""


class SchemaErrors(AcxError):
    """Several schema errors found by one validation pass."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__('; '.join(e.message for e in self.errors),
                         details=[e.to_primitive() for e in self.errors])


class UnknownSort(AcxError):
    pass


class ArityMismatch(AcxError):
    pass


class DuplicateName(AcxError):
    pass


class UnboundVariable(AcxError):
    pass


class UnknownRelation(AcxError):
    pass


class UnknownQuery(AcxError):
    pass


class UnknownCommand(AcxError):
    pass


class SortMismatch(AcxError):
    pass


class RuleEmitsUnknownRelation(AcxError):
    pass


class UntranslatableAtom(AcxError):
    pass


class MissingCommandRule(AcxError):
    pass


class MissingQueryRule(AcxError):
    pass


class DuplicateRule(AcxError):
    pass


class NoActorDeclared(AcxError):
    pass


class SignatureMismatch(AcxError):
    pass


class UnknownTag(AcxError):
    pass


class UnknownSimulation(AcxError):
    pass


class NoCanonicalData(AcxError):
    pass


class UnknownId(AcxError):
    pass
