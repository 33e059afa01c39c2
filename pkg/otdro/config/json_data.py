from abc import ABCMeta, abstractmethod
import json

from .config_exception import ConfigException


class JsonData(metaclass=ABCMeta):
    """
    One section of a run document. Values live in a plain dict so that the
    section serializes to the same JSON it was read from.
    """

    def __init__(self, init_values=None):
        self._values = {}
        if init_values:
            self._values.update(init_values)
        self._required = []
        self._optional = []

    def __reduce__(self):
        return self._get_base_object(), (self._values,)

    @abstractmethod
    def _get_base_object(self):
        pass

    def _type(self):
        return self.__class__.__name__

    def _set_value(self, key, value):
        self._values[key] = value
        return self

    def _get_key(self, key):
        return self._values[key]

    def get(self, key, default=None):
        return self._values.get(key, default)

    def __contains__(self, key):
        return key in self._values

    def _fail(self, key, message):
        raise ConfigException(self._type(), key, message)

    def _check_number(self, key, low=None, high=None, strict=True, integer=False):
        """Checks an optional numeric key against (low, high)"""
        if key not in self._values or self._values[key] is None:
            return
        value = self._values[key]
        kinds = (int,) if integer else (int, float)
        if isinstance(value, bool) or not isinstance(value, kinds):
            self._fail(key, "expected a number, got {!r}".format(value))
        if low is not None and (value <= low if strict else value < low):
            self._fail(key, "must be {} {}".format(">" if strict else ">=", low))
        if high is not None and value > high:
            self._fail(key, "must be <= {}".format(high))

    def _check_choice(self, key, choices):
        if key in self._values and self._values[key] not in choices:
            self._fail(
                key,
                "{!r} is not one of {}".format(self._values[key], sorted(choices)),
            )

    def _validate_required(self):
        for required in self._required:
            if required not in self._values:
                self._fail(required, "field is required")

    def _validate_known(self):
        known = set(self._required) | set(self._optional)
        for key in self._values:
            if key not in known:
                self._fail(key, "unknown field")

    @abstractmethod
    def _validate_all_keys(self):
        pass

    def validate(self):
        self._validate_required()
        self._validate_known()
        self._validate_all_keys()
        return self

    def as_dict(self):
        return {
            k: v.as_dict() if isinstance(v, JsonData) else v
            for k, v in self._values.items()
        }

    def serialize(self, indent=4):
        self.validate()
        return json.dumps(
            self.as_dict(), sort_keys=True, indent=indent, separators=(",", ": ")
        )
