"""
mkdocs hooks that fill in the generated parts of the documentation:

- `{params::reference}`: every setting of `config_default.yaml`, grouped by section
- `{parsers::types}`: the parser types and an example setting of each type
"""

import os
import sys

import yaml

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../../"))

from rectiforge.common.config.parseconfig import check_params, load_default_yaml
from rectiforge.common.config.utils import flatten, get_nested
from rectiforge.common.config.utils.parsers import PARSER_FACTORY

params, parser_tree = check_params({}, return_parser_tree=True)

# Settings that can be changed from the command line
CLI_FLAGS = {
    ("hb", "harmonics"): "--harmonics",
    ("media", "stub mode"): "--stub-mode",
    ("devices", "breakdown"): "--breakdown",
}


def on_page_markdown(markdown, **kwargs):
    if "{params::reference}" in markdown:
        markdown = markdown.replace("{params::reference}", param_reference())
    if "{parsers::types}" in markdown:
        markdown = markdown.replace("{parsers::types}", parser_types())
    return markdown


def param_reference():
    sections = []
    for section, subtree in parser_tree.items():
        lines = [f'<div id="{section}" class="param_group" markdown>', f"## {section}", ""]
        for name, parser in subtree.items():
            lines.append(_param_block(section, name, parser))
        lines.append("</div>")
        sections.append("\n".join(lines))
    return "\n\n".join(sections)


def _param_block(section, name, parser):
    indent = "    "
    dotted = f"{section}.{name.replace(' ', '_')}"
    value = parser.default
    python_value = f'"{value}"' if isinstance(value, str) else value
    yaml_value = str(value).lower() if isinstance(value, bool) else value

    block = f'??? parameter "{name}"\n'
    block += f'{indent}<span id="{dotted}" class="param_anchor"> </span>\n'
    block += parser.to_markdown(indent) + "\n\n"
    block += f"""{indent}=== "Python"

{indent}    ```python hl_lines="2"
{indent}    params = load_params()
{indent}    params["{section}"]["{name}"] = {python_value}
{indent}    model = RectiForge("doubler", params)
{indent}    ```

{indent}=== "Netlist"

{indent}    ```
{indent}    .options {dotted}={yaml_value}
{indent}    ```
"""
    flag = CLI_FLAGS.get((section, name))
    if flag is not None:
        block += f"""
{indent}=== "Command line"

{indent}    ```bash
{indent}    rectiforge sim doubler --f0 95e6 --pin -10 {flag}
{indent}    ```
"""
    return block + "\n"


def parser_types():
    defaults = load_default_yaml()
    flat_tree = flatten(parser_tree)
    markdown = '??? info "Parser types"\n\n'
    for typename, parser_class in PARSER_FACTORY.parsers.items():
        doc = (parser_class.__doc__ or "").strip().replace("\n", "\n        ")
        markdown += f'    ??? parameter "{typename}"\n'
        markdown += f'        <div id="parser-{typename}" markdown class="param_anchor">\n\n'
        markdown += f"        {doc}\n\n"
        example = next((key for key, p in flat_tree.items() if p.type == typename), None)
        if example is not None:
            keys = example.split(" - ")
            snippet = yaml.dump(
                {keys[0]: {keys[1]: get_nested(defaults, keys)}}, default_flow_style=False
            )
            snippet = snippet.strip().replace("\n", "\n        ")
            markdown += f"        Example:\n\n        ```yaml\n        {snippet}\n        ```\n"
        markdown += "        </div>\n\n"
    return markdown
