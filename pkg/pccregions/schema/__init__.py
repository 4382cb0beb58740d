from .model import *
from .documents import *
