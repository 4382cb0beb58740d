__all__ = [
    'documents_registry',
    'Field',
    'DocumentMeta',
    'Document'
]
import json
from enum import Enum
from typing import Mapping, MutableMapping, Callable, Optional, Type, TypeVar, Any, Union, Tuple

from ..exceptions import ParseError

documents_registry = {}  # type: MutableMapping[str, Type[Document]]


FieldDataT = TypeVar('FieldDataT')


class Field:
    """Defines a key of a JSON input document. The attribute it is
    assigned to gives object access to the value under `raw_name`.

    JSON carries only a few primitive types, so every field declares the
    python type(s) its raw value must have, optional conversion
    callbacks and an optional validation callback. Any violation is a
    ParseError naming the document and the key, raised before any
    computation starts.
    """
    def __init__(self,
                 raw_name: str,
                 field_datatype: Union[Type, Tuple[Type, ...]] = str,
                 get_cb: Optional[Callable[[Any], Any]] = None,
                 set_cb: Optional[Callable[[Any], Any]] = None,
                 validation_cb: Optional[Callable[[FieldDataT], bool]] = None,
                 required: bool = False,
                 default: Any = None):
        """On reading a field from a document, the process is:
         1. Take the raw value under `raw_name`. If it is absent, return
            `default`
         2. If `get_cb` is set then call it and use its result as value

        On writing a field, the process is:
         1. Check the value against `field_datatype`, raise an error if
            it does not match
         2. If `validation_cb` is set then call it, if the result is
            false then raise an error
         3. Extract Enum value if value is Enum
         4. If `set_cb` is set then call it and use its result as the
            raw value

        Args:
            raw_name (str): key in the JSON document
            field_datatype: accepted type or tuple of types of the raw
                value. `str` by default
            get_cb (Callable[[Any], Any], optional): converts the raw
                value on read
            set_cb (Callable[[Any], Any], optional): converts a checked
                value to its raw form on write
            validation_cb (Callable[[FieldDataT], bool], optional):
                returns false for values outside the allowed domain
            required (bool): the key must be present in the document
            default: value returned when the key is absent
        """
        self._raw_name = raw_name
        self._field_datatype = field_datatype
        self._get_cb = get_cb
        self._set_cb = set_cb
        self._validation_cb = validation_cb
        self._required = required
        self._default = default

    @property
    def raw_name(self) -> str:
        return self._raw_name

    @property
    def field_datatype(self) -> Union[Type, Tuple[Type, ...]]:
        return self._field_datatype

    @property
    def required(self) -> bool:
        return self._required

    def to_raw_value(self, value: Any) -> Any:
        """Check a value and convert it to its raw JSON form

        Raises:
            ParseError: wrong type or failed validation
        """
        if isinstance(value, bool) and self._field_datatype in (int, float, (int, float)):
            raise ParseError('Key {!r} must be a number, got a boolean'.format(self._raw_name))
        if not isinstance(value, self._field_datatype):
            raise ParseError('Key {!r} has type {}, must be {}'.format(
                self._raw_name, type(value).__name__, self._type_name()
            ))

        if not(self._validation_cb is None or self._validation_cb(value)):
            raise ParseError('Key {!r} value {!r} does not meet its restrictions'.format(self._raw_name, value))

        if isinstance(value, Enum):
            value = value.value

        if self._set_cb is not None:
            value = self._set_cb(value)

        return value

    def to_field_value(self, value: Any) -> FieldDataT:
        if self._get_cb is not None:
            value = self._get_cb(value)
        return value

    def _type_name(self) -> str:
        types = self._field_datatype if isinstance(self._field_datatype, tuple) else (self._field_datatype, )
        return ' or '.join(t.__name__ for t in types)

    def __hash__(self):
        return hash(self._raw_name)

    def __get__(self, instance, owner):
        if instance is None:
            return self

        value = instance._raw_data.get(self._raw_name)
        if value is None:
            return self._default

        return self.to_field_value(value)

    def __set__(self, instance, value):
        if instance is None:
            return

        if value is None:
            self.__delete__(instance)
            return

        instance._raw_data[self._raw_name] = self.to_raw_value(value)

    def __delete__(self, instance):
        if instance is None:
            return

        instance._raw_data.pop(self._raw_name, None)


class DocumentMeta(type):
    def __new__(mcs, name, bases, attrs):
        attrs['_fields_mapping'] = {}
        attrs.setdefault('__annotations__', {})
        for base in bases:
            attrs['_fields_mapping'].update(getattr(base, '_fields_mapping', None) or {})
        for attr_name, attr in attrs.items():
            if isinstance(attr, Field):
                attrs['_fields_mapping'][attr_name] = attr.raw_name
                attrs[attr_name].__doc__ = '{}.{}'.format(name, attr_name)
                attrs['__annotations__'][attr_name] = attr.field_datatype

        klass = super(DocumentMeta, mcs).__new__(mcs, name, bases, attrs)
        if klass.document_kind is not None:
            documents_registry[klass.document_kind] = klass  # noqa
        return klass


class Document(metaclass=DocumentMeta):
    """Base class of validated JSON input documents.

    A concrete document declares its kind and its fields. Loading goes
    through `from_json` which rejects unknown keys, missing required
    keys and values of the wrong type; `build` turns a valid document
    into the object the computation works on.
    """
    document_kind = None
    """Document kind, the key in `documents_registry`"""

    _fields_mapping = None

    def __init__(self, **fields):
        """Accepts initial fields data in kwargs"""
        self._raw_data = {}  # type: MutableMapping[str, Any]

        fm = self._fields_mapping
        unknown_fields = fields.keys() - fm.keys()
        if unknown_fields:
            raise ParseError('Unknown keys in {} document: {}'.format(self.document_kind, sorted(unknown_fields)))

        for field in fm.keys() & fields.keys():
            if fields[field] is not None:
                setattr(self, field, fields[field])

        missing = [fm[f] for f in fm if getattr(self.__class__, f).required and fm[f] not in self._raw_data]
        if missing:
            raise ParseError('Missing keys in {} document: {}'.format(self.document_kind, missing))

    @classmethod
    def from_json(cls, data: Union[str, bytes, Mapping]) -> 'Document':
        """Parse and validate a document given as JSON text or as an
        already decoded mapping

        Raises:
            ParseError: malformed JSON or a schema violation
        """
        if isinstance(data, (str, bytes)):
            try:
                data = json.loads(data)
            except ValueError as e:
                raise ParseError('Malformed {} JSON: {}'.format(cls.document_kind, e))
        if not isinstance(data, Mapping):
            raise ParseError('{} document must be a JSON object'.format(cls.document_kind))

        by_raw = {raw: attr for attr, raw in cls._fields_mapping.items()}
        unknown = data.keys() - by_raw.keys()
        if unknown:
            raise ParseError('Unknown keys in {} document: {}'.format(cls.document_kind, sorted(unknown)))
        return cls(**{by_raw[k]: v for k, v in data.items()})

    @property
    def dict(self) -> Mapping[str, Any]:
        return {field: getattr(self, field) for field in self._fields_mapping.keys()}

    @property
    def raw_data(self) -> Mapping[str, Any]:
        """Raw JSON mapping of the keys present in the document"""
        return dict(self._raw_data)

    @classmethod
    def fields_mapping(cls) -> Mapping[str, str]:
        """Mapping between document fields and their JSON keys"""
        return cls._fields_mapping

    def build(self, *args, **kwargs):
        raise NotImplementedError

    def __repr__(self):
        return '{}({})'.format(self.__class__.__name__, ', '.join(sorted(self._raw_data)))
