# -*- coding: utf-8 -*-
import enum

from acx.exceptions import UnknownTag


class Dimension(enum.Enum):
    SC = 'SC'
    SS = 'SS'
    CD = 'CD'
    CC = 'CC'
    CS = 'CS'
    CT = 'CT'
    CA = 'CA'
    QD = 'QD'
    QC = 'QC'
    QP = 'QP'
    R = 'R'


DIMENSION_ORDER = list(Dimension)


class PropertyTag(enum.Enum):
    """A point of the property lattice. The value is the display symbol, the
    member name is the ASCII spelling accepted on the command line.
    """
    SCs = ('SC', 'SCs')
    SCq = ('SC', 'SCq')
    SCa = ('SC', 'SCa')
    SSl = ('SS', 'SSl')
    SSp = ('SS', 'SSp')
    SSinf = ('SS', 'SS∞')
    CDi = ('CD', 'CDi')
    CDt = ('CD', 'CDt')
    CDs = ('CD', 'CDs')
    CCc = ('CC', 'CCc')
    CCl = ('CC', 'CCl')
    CCinf = ('CC', 'CC∞')
    CS1 = ('CS', 'CS1')
    CSc = ('CS', 'CSc')
    CSinf = ('CS', 'CS∞')
    CT1 = ('CT', 'CT1')
    CTq = ('CT', 'CTq')
    CTa = ('CT', 'CTa')
    CTs = ('CT', 'CTs')
    CAtop = ('CA', 'CA⊤')
    CAa = ('CA', 'CAa')
    QD1 = ('QD', 'QD1')
    QDi = ('QD', 'QDi')
    QDt = ('QD', 'QDt')
    QDs = ('QD', 'QDs')
    QCc = ('QC', 'QCc')
    QCinf = ('QC', 'QC∞')
    QPf = ('QP', 'QPf')
    QPa = ('QP', 'QPa')
    QPw = ('QP', 'QPw')
    Rfwd = ('R', 'R→')
    Rbi = ('R', 'R↔')

    def __new__(cls, dimension, symbol):
        obj = object.__new__(cls)
        obj._value_ = symbol
        obj.dimension = Dimension(dimension)
        return obj

    @property
    def symbol(self):
        return self.value

    @property
    def ascii(self):
        return self.name

    def sort_key(self):
        members = list(PropertyTag)
        return DIMENSION_ORDER.index(self.dimension), members.index(self)

    def __str__(self):
        return self.value

    def to_primitive(self):
        return self.value

    @classmethod
    def parse(cls, text):
        """Accepts the display symbol (``R↔``) or the ASCII spelling (``Rbi``)."""
        if isinstance(text, cls):
            return text
        text = (text or '').strip()
        if text in cls.__members__:
            return cls.__members__[text]
        try:
            return cls(text)
        except ValueError:
            raise UnknownTag('unknown property tag %r' % text)

    @classmethod
    def parse_list(cls, text):
        """Comma or whitespace separated list of tags."""
        items = text.replace(',', ' ').split() if isinstance(text, str) else list(text)
        return [cls.parse(item) for item in items]


def sort_tags(tags):
    return sorted(tags, key=PropertyTag.sort_key)


def ascii_table():
    """Rows of (ASCII spelling, symbol) for help texts."""
    return [(tag.ascii, tag.symbol) for tag in PropertyTag if tag.ascii != tag.symbol]
