import copy


def get_nested(dictionary, keys, create=False):
    for key in keys:
        if key not in dictionary and create:
            dictionary[key] = {}
        dictionary = dictionary[key]
    return dictionary


def set_nested(dictionary, keys, value):
    dictionary = get_nested(dictionary, keys[:-1], True)
    dictionary[keys[-1]] = value


def flatten(joined_dict, leaf_criterium=None):

    flattened_dict = {}

    leaf_criterium_default = lambda keys, node: not isinstance(node, dict)

    if leaf_criterium is None:
        leaf_criterium = leaf_criterium_default

    def _recursive_traverse(curr_keys, subset):
        for key, node in subset.items():
            keys = list(curr_keys) + [key]
            if leaf_criterium(keys, node):
                flattened_dict[" - ".join(keys)] = node
            else:
                _recursive_traverse(keys, node)

    _recursive_traverse([], joined_dict)

    return flattened_dict


def dotted_to_keys(dotted_key):
    """`hb.max_iterations` -> ["hb", "max iterations"]"""
    return [part.strip().replace("_", " ") for part in dotted_key.split(".")]


def unflatten_dotted(options):
    """Turns {"hb.max_iterations": "50"} into {"hb": {"max iterations": "50"}}"""
    nested = {}
    for dotted_key, value in options.items():
        set_nested(nested, dotted_to_keys(dotted_key), value)
    return nested


def merge_nested(base, override):
    """Returns a deep copy of `base` with the leaves of `override` written over it"""
    merged = copy.deepcopy(base)

    def _merge(target, source):
        for key, node in source.items():
            if isinstance(node, dict) and isinstance(target.get(key), dict):
                _merge(target[key], node)
            else:
                target[key] = copy.deepcopy(node)

    _merge(merged, override)
    return merged
