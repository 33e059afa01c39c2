from .exceptions import DroException
