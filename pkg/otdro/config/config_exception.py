from ..exceptions import DroException


class ConfigException(DroException):
    def __init__(self, section, key, message=""):
        super().__init__(
            "Section {0}, field {1} : {2}".format(section, key, message),
            DroException.ExceptionType.Configuration,
            {"section": section, "key": key},
        )
        self.section = section
        self.key = key
