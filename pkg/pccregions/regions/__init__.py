from .polytope import *
from .testchannel import *
from .evaluators import *
