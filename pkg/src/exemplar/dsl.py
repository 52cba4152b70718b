"""Textual schema and tree-selection formats.

Schema grammar (one declaration per line, `#` comments):

    value  NAME size NAT [examples ["a", "b", ...]]
    entity NAME refby super NAME
                      | roles (role, ...)
                      | pairs ((p, q), ...)
    rel    NAME (role: TYPE, ...) [unique(role, ...)] [total(role)] ...
    NAME isa NAME

Tree grammar (braces nest):

    root LABEL: TYPE { (edge LINK -> LABEL: TYPE { ... } | explode)* }

A LINK is a role name, reversed with a trailing `~`. Both parsers are total:
any input yields a value and/or positioned diagnostics, never an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    PairSeqRef,
    RefScheme,
    RoleId,
    RoleSeqRef,
    Schema,
    SuperTypeRef,
    TypeId,
    validate_schema,
)
from .tree import GridTree, Link, TreeEditError, add_edge, explode, new_tree, validate_tree


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # error | warning
    line: int
    column: int
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity} {self.code}: {self.message}"


@dataclass
class ParseResult:
    schema: Schema
    diagnostics: list[ParseDiagnostic]

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


@dataclass
class TreeParseResult:
    tree: GridTree | None
    diagnostics: list[ParseDiagnostic]
    labels: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.tree is not None and not any(d.severity == "error" for d in self.diagnostics)


# --- lexer -------------------------------------------------------------------

@dataclass(frozen=True)
class _Token:
    kind: str  # id | nat | str | punctuation literal | eof
    text: str
    line: int
    col: int


_PUNCT_2 = ("->",)
_PUNCT_1 = "()[]{},:~"


def _lex(text: str) -> tuple[list[_Token], list[ParseDiagnostic]]:
    tokens: list[_Token] = []
    diags: list[ParseDiagnostic] = []
    line, col, i = 1, 1, 0
    n = len(text)

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                advance()
            continue
        if text.startswith(_PUNCT_2[0], i):
            tokens.append(_Token("->", "->", line, col))
            advance(2)
            continue
        if ch in _PUNCT_1:
            tokens.append(_Token(ch, ch, line, col))
            advance()
            continue
        if ch == '"':
            start_line, start_col = line, col
            advance()
            buf: list[str] = []
            closed = False
            while i < n:
                c = text[i]
                if c == '"':
                    advance()
                    closed = True
                    break
                if c == "\n":
                    break
                if c == "\\" and i + 1 < n and text[i + 1] in ('"', "\\"):
                    buf.append(text[i + 1])
                    advance(2)
                    continue
                buf.append(c)
                advance()
            if not closed:
                diags.append(ParseDiagnostic("error", start_line, start_col,
                                             "UnterminatedString", "string literal never closes"))
            tokens.append(_Token("str", "".join(buf), start_line, start_col))
            continue
        if ch.isdigit():
            start_line, start_col = line, col
            start = i
            while i < n and text[i].isdigit():
                advance()
            tokens.append(_Token("nat", text[start:i], start_line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start_line, start_col = line, col
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                advance()
            tokens.append(_Token("id", text[start:i], start_line, start_col))
            continue
        diags.append(ParseDiagnostic("error", line, col, "UnexpectedCharacter",
                                     f"cannot read {ch!r}"))
        advance()
    tokens.append(_Token("eof", "", line, col))
    return tokens, diags


class _Cursor:
    def __init__(self, tokens: list[_Token], diags: list[ParseDiagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diags = diags

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def error(self, tok: _Token, code: str, message: str) -> None:
        self.diags.append(ParseDiagnostic("error", tok.line, tok.col, code, message))

    def expect(self, kind: str, what: str) -> _Token | None:
        tok = self.peek()
        if tok.kind != kind:
            self.error(tok, "Syntax", f"expected {what}, found {tok.text or 'end of input'!r}")
            return None
        return self.take()

    def match_word(self, word: str) -> bool:
        tok = self.peek()
        if tok.kind == "id" and tok.text == word:
            self.take()
            return True
        return False

    def skip_line(self, line: int) -> None:
        while not self.at_end() and self.peek().line <= line:
            self.take()


# --- schema parsing ----------------------------------------------------------

@dataclass
class _RawValue:
    name: _Token
    size: int
    examples: tuple[str, ...]


@dataclass
class _RawEntity:
    name: _Token
    kind: str  # super | roles | pairs
    names: list[_Token]  # type name, role names, or flattened pair roles


@dataclass
class _RawRel:
    name: _Token
    roles: list[tuple[_Token, _Token]]  # (role, player type)
    uniqueness: list[list[_Token]]
    totality: list[list[_Token]]


@dataclass
class _RawIsa:
    sub: _Token
    sup: _Token


def parse_schema(text: str) -> ParseResult:
    tokens, lex_diags = _lex(text)
    cur = _Cursor(tokens, list(lex_diags))
    decls: list[object] = []
    while not cur.at_end():
        tok = cur.peek()
        start_line = tok.line
        decl = _parse_decl(cur)
        if decl is None:
            cur.skip_line(start_line)
        else:
            decls.append(decl)
    schema = _assemble(decls, cur.diags)
    for v in validate_schema(schema):
        cur.diags.append(ParseDiagnostic("error", 1, 1, v.code, v.message))
    cur.diags.sort(key=lambda d: (d.line, d.column))
    return ParseResult(schema, cur.diags)


def _parse_decl(cur: _Cursor):
    tok = cur.peek()
    if tok.kind != "id":
        cur.error(tok, "Syntax", f"expected a declaration, found {tok.text!r}")
        return None
    if tok.text == "value":
        return _parse_value(cur)
    if tok.text == "entity":
        return _parse_entity(cur)
    if tok.text == "rel":
        return _parse_rel(cur)
    # NAME isa NAME
    sub = cur.take()
    if not cur.match_word("isa"):
        cur.error(cur.peek(), "Syntax", f"expected 'isa' after {sub.text!r}")
        return None
    sup = cur.expect("id", "a type name")
    if sup is None:
        return None
    return _RawIsa(sub, sup)


def _parse_value(cur: _Cursor):
    cur.take()  # value
    name = cur.expect("id", "a value type name")
    if name is None:
        return None
    if not cur.match_word("size"):
        cur.error(cur.peek(), "Syntax", "expected 'size'")
        return None
    size_tok = cur.expect("nat", "a domain size")
    if size_tok is None:
        return None
    examples: list[str] = []
    if cur.match_word("examples"):
        if cur.expect("[", "'['") is None:
            return None
        while True:
            s = cur.expect("str", "a string literal")
            if s is None:
                return None
            examples.append(s.text)
            if cur.peek().kind == ",":
                cur.take()
                continue
            break
        if cur.expect("]", "']'") is None:
            return None
    return _RawValue(name, int(size_tok.text), tuple(examples))


def _parse_entity(cur: _Cursor):
    cur.take()  # entity
    name = cur.expect("id", "an entity type name")
    if name is None:
        return None
    if not cur.match_word("refby"):
        cur.error(cur.peek(), "Syntax", "expected 'refby'")
        return None
    if cur.match_word("super"):
        sup = cur.expect("id", "a type name")
        if sup is None:
            return None
        return _RawEntity(name, "super", [sup])
    if cur.match_word("roles"):
        names = _parse_id_parens(cur)
        if names is None:
            return None
        return _RawEntity(name, "roles", names)
    if cur.match_word("pairs"):
        if cur.expect("(", "'('") is None:
            return None
        names: list[_Token] = []
        while True:
            pair = _parse_id_parens(cur)
            if pair is None:
                return None
            if len(pair) != 2:
                cur.error(pair[0], "Syntax", "an identification pair needs exactly two roles")
                return None
            names.extend(pair)
            if cur.peek().kind == ",":
                cur.take()
                continue
            break
        if cur.expect(")", "')'") is None:
            return None
        return _RawEntity(name, "pairs", names)
    cur.error(cur.peek(), "Syntax", "expected 'super', 'roles' or 'pairs'")
    return None


def _parse_id_parens(cur: _Cursor) -> list[_Token] | None:
    if cur.expect("(", "'('") is None:
        return None
    names: list[_Token] = []
    while True:
        tok = cur.expect("id", "a name")
        if tok is None:
            return None
        names.append(tok)
        if cur.peek().kind == ",":
            cur.take()
            continue
        break
    if cur.expect(")", "')'") is None:
        return None
    return names


def _parse_rel(cur: _Cursor):
    cur.take()  # rel
    name = cur.expect("id", "a relationship type name")
    if name is None:
        return None
    if cur.expect("(", "'('") is None:
        return None
    roles: list[tuple[_Token, _Token]] = []
    while True:
        role = cur.expect("id", "a role name")
        if role is None:
            return None
        if cur.expect(":", "':'") is None:
            return None
        player = cur.expect("id", "a type name")
        if player is None:
            return None
        roles.append((role, player))
        if cur.peek().kind == ",":
            cur.take()
            continue
        break
    if cur.expect(")", "')'") is None:
        return None
    uniqueness: list[list[_Token]] = []
    totality: list[list[_Token]] = []
    while True:
        if cur.match_word("unique"):
            names = _parse_id_parens(cur)
            if names is None:
                return None
            uniqueness.append(names)
            continue
        if cur.match_word("total"):
            names = _parse_id_parens(cur)
            if names is None:
                return None
            totality.append(names)
            continue
        break
    return _RawRel(name, roles, uniqueness, totality)


def _assemble(decls: list[object], diags: list[ParseDiagnostic]) -> Schema:
    types: list[TypeId] = []
    value_types: set[TypeId] = set()
    rel_types: set[TypeId] = set()
    preds: list[RoleId] = []
    roles: dict[TypeId, tuple[RoleId, ...]] = {}
    player: dict[RoleId, TypeId] = {}
    subtypes: list[tuple[TypeId, TypeId]] = []
    ref_schemes: dict[TypeId, RefScheme] = {}
    dom_sizes: dict[TypeId, int] = {}
    value_examples: dict[TypeId, tuple[str, ...]] = {}
    uniqueness: list[frozenset[RoleId]] = []
    totality: list[frozenset[RoleId]] = []

    def err(tok: _Token, code: str, message: str) -> None:
        diags.append(ParseDiagnostic("error", tok.line, tok.col, code, message))

    def declare(tok: _Token) -> bool:
        if tok.text in set(types):
            err(tok, "DuplicateType", f"type {tok.text} declared twice")
            return False
        types.append(tok.text)
        return True

    # first pass: register all type names so declarations may forward-reference
    for d in decls:
        if isinstance(d, _RawValue):
            if declare(d.name):
                value_types.add(d.name.text)
                dom_sizes[d.name.text] = d.size
                if d.examples:
                    value_examples[d.name.text] = d.examples
        elif isinstance(d, _RawEntity):
            declare(d.name)
        elif isinstance(d, _RawRel):
            if declare(d.name):
                rel_types.add(d.name.text)

    # second pass: roles and players
    for d in decls:
        if not isinstance(d, _RawRel) or d.name.text not in rel_types:
            continue
        rel_roles: list[RoleId] = []
        ok = True
        for role_tok, player_tok in d.roles:
            if player_tok.text not in set(types):
                err(player_tok, "UnknownType", f"unknown type {player_tok.text}")
                ok = False
            if role_tok.text in player or role_tok.text in rel_roles:
                err(role_tok, "DuplicateRole", f"role {role_tok.text} declared twice")
                ok = False
        if not ok:
            rel_types.discard(d.name.text)
            types.remove(d.name.text)
            continue
        for role_tok, player_tok in d.roles:
            rel_roles.append(role_tok.text)
            player[role_tok.text] = player_tok.text
            preds.append(role_tok.text)
        roles[d.name.text] = tuple(rel_roles)
        ref_schemes[d.name.text] = RoleSeqRef(tuple(rel_roles))

    # third pass: everything that references roles or other types
    for d in decls:
        if isinstance(d, _RawEntity):
            name = d.name.text
            if name not in set(types) or name in rel_types or name in value_types:
                continue
            if d.kind == "super":
                tok = d.names[0]
                if tok.text not in set(types):
                    err(tok, "UnknownType", f"unknown type {tok.text}")
                    continue
                ref_schemes[name] = SuperTypeRef(tok.text)
            elif d.kind == "roles":
                if not _roles_known(d.names, player, err):
                    continue
                ref_schemes[name] = RoleSeqRef(tuple(t.text for t in d.names))
            else:
                if not _roles_known(d.names, player, err):
                    continue
                it = iter(t.text for t in d.names)
                ref_schemes[name] = PairSeqRef(tuple(zip(it, it)))
        elif isinstance(d, _RawRel) and d.name.text in rel_types:
            for names in d.uniqueness:
                if _roles_known(names, player, err):
                    uniqueness.append(frozenset(t.text for t in names))
            for names in d.totality:
                if _roles_known(names, player, err):
                    totality.append(frozenset(t.text for t in names))
        elif isinstance(d, _RawIsa):
            ok = True
            for tok in (d.sub, d.sup):
                if tok.text not in set(types):
                    err(tok, "UnknownType", f"unknown type {tok.text}")
                    ok = False
            if ok:
                subtypes.append((d.sub.text, d.sup.text))

    return Schema(
        types=tuple(types),
        value_types=frozenset(value_types),
        rel_types=frozenset(rel_types),
        preds=tuple(preds),
        roles=roles,
        player=player,
        subtypes=tuple(subtypes),
        ref_schemes=ref_schemes,
        dom_sizes=dom_sizes,
        value_examples=value_examples,
        uniqueness=tuple(uniqueness),
        totality=tuple(totality),
    )


def _roles_known(names: list[_Token], player: dict[RoleId, TypeId],
                 err) -> bool:
    ok = True
    for tok in names:
        if tok.text not in player:
            err(tok, "UnknownRole", f"unknown role {tok.text}")
            ok = False
    return ok


# --- schema rendering --------------------------------------------------------

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render_schema(schema: Schema) -> str:
    """Canonical text: values, then entities, relationships, subtype links;
    declaration order preserved within each group. Reparsing yields an
    isomorphic schema."""
    lines: list[str] = []
    for t in schema.types:
        if t in schema.value_types:
            line = f"value {t} size {schema.dom_sizes.get(t, 0)}"
            examples = schema.value_examples.get(t)
            if examples:
                line += " examples [" + ", ".join(_quote(e) for e in examples) + "]"
            lines.append(line)
    for t in schema.types:
        if t in schema.value_types or t in schema.rel_types:
            continue
        ref = schema.ref_schemes.get(t)
        if isinstance(ref, SuperTypeRef):
            lines.append(f"entity {t} refby super {ref.type}")
        elif isinstance(ref, RoleSeqRef):
            lines.append(f"entity {t} refby roles (" + ", ".join(ref.roles) + ")")
        elif isinstance(ref, PairSeqRef):
            pairs = ", ".join(f"({p},{q})" for p, q in ref.pairs)
            lines.append(f"entity {t} refby pairs ({pairs})")
        else:
            lines.append(f"entity {t} refby roles ()")
    for t in schema.types:
        if t not in schema.rel_types:
            continue
        parts = ", ".join(f"{r}: {schema.player[r]}" for r in schema.roles.get(t, ()))
        line = f"rel {t} ({parts})"
        rel_roles = set(schema.roles.get(t, ()))
        for u in schema.uniqueness:
            if u <= rel_roles:
                ordered = [r for r in schema.roles[t] if r in u]
                line += " unique(" + ", ".join(ordered) + ")"
        for s in schema.totality:
            if s <= rel_roles:
                ordered = [r for r in schema.roles[t] if r in s]
                line += " total(" + ", ".join(ordered) + ")"
        lines.append(line)
    for sub, sup in schema.subtypes:
        lines.append(f"{sub} isa {sup}")
    return "\n".join(lines) + ("\n" if lines else "")


# --- tree specifications -----------------------------------------------------

def parse_tree_spec(text: str, schema: Schema) -> TreeParseResult:
    tokens, lex_diags = _lex(text)
    cur = _Cursor(tokens, list(lex_diags))
    result = TreeParseResult(None, cur.diags)

    if not cur.match_word("root"):
        cur.error(cur.peek(), "Syntax", "expected 'root'")
        cur.diags.sort(key=lambda d: (d.line, d.column))
        return result
    label = cur.expect("id", "a node label")
    if label is None or cur.expect(":", "':'") is None:
        cur.diags.sort(key=lambda d: (d.line, d.column))
        return result
    type_tok = cur.expect("id", "a type name")
    if type_tok is None:
        cur.diags.sort(key=lambda d: (d.line, d.column))
        return result
    if type_tok.text not in set(schema.types):
        cur.error(type_tok, "UnknownType", f"unknown type {type_tok.text}")
        cur.diags.sort(key=lambda d: (d.line, d.column))
        return result

    tree = new_tree(schema, type_tok.text)
    root = tree.nodes[0]
    result.labels[label.text] = root
    if cur.peek().kind == "{":
        tree = _parse_block(cur, schema, tree, root, result)
    if not cur.at_end():
        cur.error(cur.peek(), "Syntax", f"unexpected {cur.peek().text!r} after the tree")

    for v in validate_tree(schema, tree):
        cur.diags.append(ParseDiagnostic("error", 1, 1, v.code, v.message))
    result.tree = tree
    cur.diags.sort(key=lambda d: (d.line, d.column))
    return result


def _parse_block(cur: _Cursor, schema: Schema, tree: GridTree, node: str,
                 result: TreeParseResult) -> GridTree:
    cur.take()  # {
    while True:
        tok = cur.peek()
        if tok.kind == "}":
            cur.take()
            return tree
        if tok.kind == "eof":
            cur.error(tok, "Syntax", "block never closes")
            return tree
        if cur.match_word("explode"):
            try:
                tree = explode(schema, tree, node)
            except TreeEditError as exc:
                cur.error(tok, exc.code, exc.message)
            continue
        if cur.match_word("edge"):
            tree = _parse_edge(cur, schema, tree, node, result, tok)
            continue
        cur.error(tok, "Syntax", f"expected 'edge', 'explode' or '}}', found {tok.text!r}")
        cur.take()


def _parse_edge(cur: _Cursor, schema: Schema, tree: GridTree, node: str,
                result: TreeParseResult, at: _Token) -> GridTree:
    role_tok = cur.expect("id", "a role name")
    if role_tok is None:
        return tree
    link = Link(role_tok.text, reversed=False)
    if cur.peek().kind == "~":
        cur.take()
        link = Link(role_tok.text, reversed=True)
    if cur.expect("->", "'->'") is None:
        return tree
    label = cur.expect("id", "a node label")
    if label is None or cur.expect(":", "':'") is None:
        return tree
    type_tok = cur.expect("id", "a type name")
    if type_tok is None:
        return tree

    if link.role not in schema.player:
        cur.error(role_tok, "UnknownRole", f"unknown role {link.role}")
        _skip_optional_block(cur)
        return tree
    if label.text in result.labels:
        cur.error(label, "DuplicateLabel", f"node label {label.text} already used")
        _skip_optional_block(cur)
        return tree
    try:
        child = f"n{tree.next_id}"
        tree = add_edge(schema, tree, node, link)
    except TreeEditError as exc:
        cur.error(role_tok, exc.code, exc.message)
        _skip_optional_block(cur)
        return tree
    result.labels[label.text] = child
    if tree.obj[child] != type_tok.text:
        cur.error(type_tok, "EdgeWellFormedness",
                  f"link {link} ends at {tree.obj[child]}, not {type_tok.text}")
    if cur.peek().kind == "{":
        tree = _parse_block(cur, schema, tree, child, result)
    return tree


def _skip_optional_block(cur: _Cursor) -> None:
    if cur.peek().kind != "{":
        return
    depth = 0
    while not cur.at_end():
        tok = cur.take()
        if tok.kind == "{":
            depth += 1
        elif tok.kind == "}":
            depth -= 1
            if depth == 0:
                return
