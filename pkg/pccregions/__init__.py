__version__ = '0.1'

from .common import *
from .enums import *
from .exceptions import *
from .algebra import *
from .info import *
from .channels import *
from .regions import *
from .schema import *
from .search import *
from .sim import *
