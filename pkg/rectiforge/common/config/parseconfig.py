"""
Parses user configuration (YAML files, netlist `.options`, command-line
overrides) and checks it against the default config template.
"""

import os
from functools import lru_cache

import yaml

from rectiforge.common.utils import load_yaml
from rectiforge.common import quant, logger

from .utils import (
    PARSER_FACTORY,
    set_nested,
    get_nested,
    flatten,
    dotted_to_keys,
    unflatten_dotted,
    merge_nested,
)


def recursive_traverse(dict_to_traverse, leaf_function, leaf_criterium=None):
    if leaf_criterium is None:
        leaf_criterium = lambda x: not isinstance(x, dict)

    def _do_recursive_traverse(curr_keys, subset):
        for key, node in subset.items():
            keys = list(curr_keys) + [key]
            if leaf_criterium(node):
                leaf_function(keys, node)
            else:
                _do_recursive_traverse(keys, node)

    _do_recursive_traverse([], dict_to_traverse)


def parse_params(default_yaml, user_yaml, return_parser_tree=False):
    parsed_dict = {}
    parser_tree = {}

    def leaf_criterium(node):
        return not isinstance(node, dict) or "type" in node

    def leaf_function(keys, node):
        parser = PARSER_FACTORY.create_parser(node, quant)

        # Save the parser instance for possible later use
        set_nested(parser_tree, keys, parser)

        # Save the parsed value
        set_nested(parsed_dict, keys, parser.get(user_yaml, keys))

    recursive_traverse(default_yaml, leaf_function, leaf_criterium)

    if return_parser_tree:
        return parsed_dict, parser_tree

    return parsed_dict


def create_leaf_criterium(parser_tree):
    def leaf_criterium(keys, node):
        try:
            parser_type = get_nested(parser_tree, keys).type
        except (AttributeError, KeyError, TypeError):
            parser_type = None
        if isinstance(node, dict) and parser_type != "dict":
            return False
        return True

    return leaf_criterium


def obsolete_keys(user_yaml, parsed_params, parser_tree):
    leaf_criterium = create_leaf_criterium(parser_tree)

    keys_user = set(flatten(user_yaml, leaf_criterium=leaf_criterium))
    keys_parsed = set(flatten(parsed_params, leaf_criterium=leaf_criterium))
    return sorted(keys_user - keys_parsed)


def check_obsolete_params(user_yaml, parsed_params, parser_tree):
    """Keys in the user config without a counterpart in the template are
    obsolete, unused or misspelled."""
    keys = obsolete_keys(user_yaml, parsed_params, parser_tree)
    for key in keys:
        logger.warning(f"Obsolete key: {key}")
    if keys:
        raise RuntimeWarning(
            "Some config parameters are obsolete: {}".format(", ".join(keys))
        )


@lru_cache(maxsize=1)
def _default_yaml_text():
    return yaml.safe_dump(load_yaml("config_default.yaml"))


def load_default_yaml():
    return yaml.safe_load(_default_yaml_text())


def check_params(input_params, return_parser_tree=False):
    default_yaml = load_default_yaml()

    parsed_params, params_parser_tree = parse_params(
        default_yaml, input_params, return_parser_tree=True
    )

    check_obsolete_params(input_params, parsed_params, params_parser_tree)

    if return_parser_tree:
        return parsed_params, params_parser_tree
    return parsed_params


def default_parser_tree():
    _, parser_tree = parse_params(load_default_yaml(), {}, return_parser_tree=True)
    return parser_tree


def option_parser(dotted_key):
    """Returns the parser handling a netlist `.options` key like `hb.harmonics`.

    Raises:
        KeyError: the key does not exist in the config template
    """
    keys = dotted_to_keys(dotted_key)
    try:
        parser = get_nested(default_parser_tree(), keys)
    except (KeyError, TypeError):
        raise KeyError(dotted_key)
    if isinstance(parser, dict):
        raise KeyError(dotted_key)
    return parser


def resolve_params(params=None, options=None, overrides=None):
    """Merges the configuration layers into one checked parameter dict.

    Precedence, from weakest to strongest: `params` (defaults when None),
    netlist `.options` (dotted keys), explicit `overrides` (nested dict,
    e.g. from command-line flags).
    """
    merged = {} if params is None else params
    if options:
        merged = merge_nested(merged, unflatten_dotted(dict(options)))
    if overrides:
        merged = merge_nested(merged, overrides)
    return check_params(merged)


def load_params(user_yaml_filename=None):
    """Loads the default parameters, updated with a user YAML file if given.

    The file name can be a path, or the name of a file in `inputdata/config`.
    """
    if user_yaml_filename is None:
        user_yaml = {}
    elif os.path.exists(user_yaml_filename):
        with open(user_yaml_filename, "r", encoding="utf8") as configfile:
            user_yaml = yaml.safe_load(configfile) or {}
    else:
        user_yaml = load_yaml(user_yaml_filename)
    return check_params(user_yaml)


@lru_cache(maxsize=1)
def _cached_default_params():
    return yaml.safe_dump(check_params({}))


def default_params():
    """Parsed defaults. A fresh copy is returned on every call."""
    return yaml.safe_load(_cached_default_params())


def params_for_circuit(circuit, params=None):
    """Parameters for a solver call: `params` when given (already resolved by
    the caller), else the defaults overridden by the circuit `.options`."""
    if params is not None:
        return params
    if not circuit.options:
        return default_params()
    return resolve_params(default_params(), circuit.options)
