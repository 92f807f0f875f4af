from .main import build_parser, main
from .specfile import ChannelSpec, format_spec, load_spec, named_spec, parse_spec
