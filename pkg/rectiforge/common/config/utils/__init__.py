from .nested_dict import (
    get_nested,
    set_nested,
    flatten,
    dotted_to_keys,
    unflatten_dotted,
    merge_nested,
)

from .parsers import GeneralParser, PARSER_FACTORY
