"""Parser for the VGDL-subset game description language.

A description has four indentation-structured sections: SpriteSet (a tree of
sprite declarations), LevelMapping (char -> sprite list), InteractionSet (one
ordered rule per line) and TerminationSet.  Only the sprite kinds and effects
used by the shipped games are accepted; anything else is a parse error.
"""
from __future__ import annotations

from dataclasses import dataclass, field

SPRITE_KINDS = {
    "Immovable",
    "Door",
    "Passive",
    "OrientedFlicker",
    "ShootAvatar",
}

EFFECTS = {
    "stepBack",
    "killSprite",
    "killBoth",
    "transformTo",
    "spawn",
    "bounceForward",
    "undoAll",
    "killIfFromAboveNotMoving",
}

AVATAR_KINDS = {"ShootAvatar"}


class VGDLError(ValueError):
    """Raised for any syntax or semantic problem in a description."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass
class SpriteDecl:
    name: str
    kind: str | None
    attrs: dict[str, str]
    parent: str | None
    children: list[str] = field(default_factory=list)
    line: int = 0

    @property
    def is_leaf(self):
        return not self.children


@dataclass
class InteractionRule:
    first: str
    seconds: list[str]
    effect: str
    params: dict[str, str]
    line: int = 0

    def text(self):
        parts = [self.first, *self.seconds, ">", self.effect]
        parts += [f"{k}={v}" for k, v in self.params.items()]
        return " ".join(parts)


@dataclass
class TerminationRule:
    stype: str
    win: bool
    line: int = 0


@dataclass
class GameDescription:
    sprites: dict[str, SpriteDecl]
    sprite_order: list[str]
    rules: list[InteractionRule]
    level_mapping: dict[str, list[str]]
    terminations: list[TerminationRule]
    avatar_name: str
    header_attrs: dict[str, str] = field(default_factory=dict)

    def leaves(self, name: str) -> list[str]:
        """Leaf sprite names under `name` (inclusive when it is a leaf)."""
        decl = self.sprites.get(name)
        if decl is None:
            raise VGDLError(f"unknown sprite {name!r}")
        if decl.is_leaf:
            return [name]
        out = []
        for child in decl.children:
            out.extend(self.leaves(child))
        return out

    @property
    def leaf_names(self) -> list[str]:
        return [n for n in self.sprite_order if self.sprites[n].is_leaf]

    @property
    def avatar_states(self) -> list[str]:
        return self.leaves(self.avatar_name)

    def kind_of(self, name: str) -> str:
        decl = self.sprites[name]
        while decl.kind is None and decl.parent is not None:
            decl = self.sprites[decl.parent]
        return decl.kind or "Immovable"

    def sword_for(self, avatar_state: str) -> str | None:
        decl = self.sprites[avatar_state]
        stype = decl.attrs.get("stype")
        if stype is None and decl.parent is not None:
            stype = self.sprites[decl.parent].attrs.get("stype")
        return stype

    def movable_sprites(self) -> list[str]:
        """Avatar states plus any sprite that is pushed by a bounceForward rule."""
        names = list(self.avatar_states)
        for rule in self.rules:
            if rule.effect == "bounceForward":
                for leaf in self.leaves(rule.first):
                    if leaf not in names:
                        names.append(leaf)
        return names


def _strip_comment(line: str) -> str:
    if "#" in line:
        line = line[: line.index("#")]
    return line.rstrip()


def _parse_attrs(tokens: list[str], lineno: int) -> dict[str, str]:
    attrs = {}
    for tok in tokens:
        if "=" not in tok:
            raise VGDLError(f"expected key=value attribute, got {tok!r}", lineno)
        key, _, value = tok.partition("=")
        attrs[key] = value
    return attrs


def parse_description(text: str) -> GameDescription:
    if not text.strip():
        raise VGDLError("empty description")

    sections: dict[str, list[tuple[int, int, str]]] = {}
    header_attrs: dict[str, str] = {}
    current = None
    section_indent = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        first_word = stripped.split()[0]
        if first_word == "BasicGame":
            header_attrs = _parse_attrs(stripped.split()[1:], lineno)
            continue
        if first_word in ("SpriteSet", "LevelMapping", "InteractionSet", "TerminationSet"):
            if len(stripped.split()) > 1:
                raise VGDLError(f"unexpected tokens after {first_word}", lineno)
            current = first_word
            section_indent = indent
            sections.setdefault(current, [])
            continue
        if current is None:
            raise VGDLError(f"content outside any section: {stripped!r}", lineno)
        if indent <= section_indent:
            raise VGDLError(f"line not indented under {current}", lineno)
        sections[current].append((lineno, indent, stripped))

    sprites, order, avatar = _parse_sprite_set(sections.get("SpriteSet", []))
    desc = GameDescription(
        sprites=sprites,
        sprite_order=order,
        rules=[],
        level_mapping={},
        terminations=[],
        avatar_name=avatar,
        header_attrs=header_attrs,
    )
    desc.level_mapping = _parse_level_mapping(sections.get("LevelMapping", []), desc)
    desc.rules = _parse_interactions(sections.get("InteractionSet", []), desc)
    desc.terminations = _parse_terminations(sections.get("TerminationSet", []), desc)

    if not desc.sprites[avatar].children:
        raise VGDLError(f"avatar {avatar!r} must declare at least one state", desc.sprites[avatar].line)
    return desc


def _parse_sprite_set(lines):
    sprites: dict[str, SpriteDecl] = {}
    order: list[str] = []
    stack: list[tuple[int, str]] = []  # (indent, name)
    avatar = None
    for lineno, indent, stripped in lines:
        if ">" not in stripped:
            raise VGDLError(f"sprite declaration needs '>': {stripped!r}", lineno)
        name_part, _, rest = stripped.partition(">")
        name = name_part.strip()
        if not name or " " in name:
            raise VGDLError(f"bad sprite name {name_part.strip()!r}", lineno)
        if name in sprites:
            raise VGDLError(f"duplicate sprite name {name!r}", lineno)
        while stack and stack[-1][0] >= indent:
            stack.pop()
        parent = stack[-1][1] if stack else None

        tokens = rest.split()
        kind = None
        attr_tokens = tokens
        if tokens and "=" not in tokens[0]:
            kind = tokens[0]
            if kind not in SPRITE_KINDS:
                raise VGDLError(f"unknown sprite kind {kind!r}", lineno)
            attr_tokens = tokens[1:]
        attrs = _parse_attrs(attr_tokens, lineno)

        decl = SpriteDecl(name=name, kind=kind, attrs=attrs, parent=parent, line=lineno)
        sprites[name] = decl
        order.append(name)
        if parent is not None:
            sprites[parent].children.append(name)
        stack.append((indent, name))
        if kind in AVATAR_KINDS:
            if avatar is not None:
                raise VGDLError(f"second avatar declaration {name!r}", lineno)
            avatar = name
    if avatar is None:
        raise VGDLError("no avatar (ShootAvatar) declared in SpriteSet")
    return sprites, order, avatar


def _check_sprite_ref(name, desc, lineno):
    if name not in desc.sprites:
        raise VGDLError(f"undeclared sprite {name!r}", lineno)


def _parse_level_mapping(lines, desc):
    mapping = {}
    for lineno, _indent, stripped in lines:
        if ">" not in stripped:
            raise VGDLError(f"mapping needs '>': {stripped!r}", lineno)
        char_part, _, rest = stripped.partition(">")
        char = char_part.strip()
        if len(char) != 1:
            raise VGDLError(f"mapping key must be a single character, got {char!r}", lineno)
        names = rest.split()
        for name in names:
            _check_sprite_ref(name, desc, lineno)
        mapping[char] = names
    return mapping


def _parse_interactions(lines, desc):
    rules = []
    for lineno, _indent, stripped in lines:
        if ">" not in stripped:
            raise VGDLError(f"interaction rule needs '>': {stripped!r}", lineno)
        left, _, right = stripped.partition(">")
        names = left.split()
        if len(names) < 2:
            raise VGDLError("interaction rule needs at least two sprites", lineno)
        for name in names:
            _check_sprite_ref(name, desc, lineno)
        tokens = right.split()
        if not tokens:
            raise VGDLError("interaction rule missing effect", lineno)
        effect = tokens[0]
        if effect not in EFFECTS:
            raise VGDLError(f"unknown effect {effect!r}", lineno)
        params = _parse_attrs(tokens[1:], lineno)
        if "stype" in params:
            _check_sprite_ref(params["stype"], desc, lineno)
        if effect in ("transformTo", "spawn") and "stype" not in params:
            raise VGDLError(f"{effect} requires stype=", lineno)
        rules.append(InteractionRule(first=names[0], seconds=names[1:], effect=effect, params=params, line=lineno))
    return rules


def _parse_terminations(lines, desc):
    terms = []
    for lineno, _indent, stripped in lines:
        tokens = stripped.split()
        if tokens[0] != "SpriteCounter":
            raise VGDLError(f"unknown termination {tokens[0]!r}", lineno)
        params = _parse_attrs(tokens[1:], lineno)
        if "stype" not in params or "win" not in params:
            raise VGDLError("SpriteCounter requires stype= and win=", lineno)
        _check_sprite_ref(params["stype"], desc, lineno)
        win = params["win"].lower() == "true"
        terms.append(TerminationRule(stype=params["stype"], win=win, line=lineno))
    return terms
