from collections.abc import MutableMapping


class InfosMapping(MutableMapping):
    """
    Attribute storage addressable as a mapping. Fields are declared with
    `declare` and stored as `_<key>` attributes; assigning an undeclared key
    through the mapping interface is an error.
    """

    def __init__(self, **kwargs):
        self._fields = []
        for key, value in kwargs.items():
            self.declare(key, value)

    @staticmethod
    def _attr(key):
        return "_{}".format(key)

    def declare(self, key, value):
        if key not in self._fields:
            self._fields.append(key)
        setattr(self, self._attr(key), value)

    def __setitem__(self, key, value):
        if key not in self._fields:
            raise KeyError("Field {} is not declared on {}".format(
                key, self.__class__.__name__
            ))
        setattr(self, self._attr(key), value)

    def __delitem__(self, key):
        if key not in self._fields:
            raise KeyError(key)
        self._fields.remove(key)
        delattr(self, self._attr(key))

    def __getitem__(self, key):
        if key not in self._fields:
            raise KeyError(key)
        return getattr(self, self._attr(key))

    def __len__(self):
        return len(self._fields)

    def __iter__(self):
        return iter(list(self._fields))

    def __str__(self):
        return str(self.as_dict())

    def as_dict(self):
        return {k: self[k] for k in self._fields}
