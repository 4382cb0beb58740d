__all__ = [
    'UserTuple',
    'DocValue',
    'DocDict',
    'format_float',
    'derive_seed'
]
from copy import copy, deepcopy
from typing import Sequence, Union, Iterable

import numpy as np
from wrapt import ObjectProxy
from wrapt.wrappers import _ObjectProxyMetaType  # noqa

SIGNIFICANT_DIGITS = 10


class UserTuple:
    """Immutable sequence wrapper, the tuple counterpart of
    `collections.UserList`. Subclasses get value semantics (ordering,
    hashing, equality with plain tuples) for free.
    """
    def __init__(self, initlist: Union[Sequence, Iterable, 'UserTuple'] = None):
        if initlist is None:
            self.data = tuple()
        elif isinstance(initlist, UserTuple):
            self.data = initlist.data
        else:
            self.data = tuple(initlist)

    def __repr__(self): return '{}{}'.format(self.__class__.__name__, self.data)
    def __lt__(self, other): return self.data <  self.__cast(other)  # noqa
    def __le__(self, other): return self.data <= self.__cast(other)
    def __eq__(self, other): return self.data == self.__cast(other)
    def __gt__(self, other): return self.data >  self.__cast(other)  # noqa
    def __ge__(self, other): return self.data >= self.__cast(other)

    @staticmethod
    def __cast(other):
        return other.data if isinstance(other, UserTuple) else other

    def __contains__(self, item): return item in self.data
    def __len__(self): return len(self.data)
    def __iter__(self): return iter(self.data)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return self.__class__(self.data[i])
        return self.data[i]

    def __hash__(self):
        return hash(self.data)

    def count(self, item): return self.data.count(item)
    def index(self, item, *args): return self.data.index(item, *args)


class DocValueMeta(_ObjectProxyMetaType):
    def __new__(cls, name, bases, attrs):
        # ObjectProxy metaclass forwards __doc__ to the wrapped object,
        # so the property has to be installed after class creation
        def get_doc(self):
            return self._self_doc if self._self_doc else self.__wrapped__.__doc__

        new_class = super().__new__(cls, name, bases, attrs)
        type.__setattr__(new_class, '__doc__', property(get_doc, None, None))
        type.__setattr__(new_class, '__module__', '')
        return new_class


class DocValue(ObjectProxy, metaclass=DocValueMeta):
    """Value of a built-in type carrying its own __doc__. Used to
    annotate exit codes and other documented constants
    """
    def __init__(self, value: Union[str, int], doc: str):
        """
        Args:
            value (Union[str, int]): value exposed by this object
            doc (str): documentation string put to __doc__
        """
        super().__init__(value)
        if not isinstance(value, (str, int)):
            raise TypeError('Init value type must be int or str')

        self._self_value = value
        self._self_doc = doc

    def __repr__(self):
        return self.__wrapped__.__repr__()

    @property
    def value(self):
        return self._self_value

    @property
    def doc(self):
        return self._self_doc

    def __copy__(self):
        return DocValue(copy(self._self_value), copy(self._self_doc))

    def __deepcopy__(self, memodict=None):
        return DocValue(deepcopy(self._self_value), deepcopy(self._self_doc))


class DocDict(dict):
    """Dictionary whose values are documented versions of its keys.

        >>> d = DocDict({2: 'Parse error'})
        >>> d[2] == 2, d[2].__doc__
        (True, 'Parse error')
    """
    def __init__(self, initdict: dict):
        super().__init__({k: DocValue(k, v) for k, v in initdict.items()})


def format_float(value: float) -> str:
    """Render a float with a fixed number of significant digits, the
    format every CSV and JSON output uses
    """
    return '{:.{}g}'.format(float(value), SIGNIFICANT_DIGITS)


def derive_seed(master: int, *keys: int) -> int:
    """Derive an independent child seed from a master seed and a path
    of integer keys (restart index, trial index, ...). The same inputs
    always give the same seed regardless of evaluation order.
    """
    seq = np.random.SeedSequence([int(master)] + [int(k) for k in keys])
    return int(seq.generate_state(1, dtype=np.uint32)[0])
