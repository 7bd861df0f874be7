"""JSON schemas for every line the CLI emits."""
import json
from importlib.resources import files


def load(name: str) -> dict:
    """Schema for ``"manifest"`` or a subcommand name such as ``"verify"``."""
    return json.loads(files(__name__).joinpath(f"{name}.json").read_text())
