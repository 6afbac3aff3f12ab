"""Line-oriented color-scheme files: `<label-id> <name> <R> <G> <B> <A>`."""

from __future__ import annotations

from ..errors import ValidationError
from ..volume import ColorScheme


def parse_color_scheme(text: str) -> ColorScheme:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValidationError(
                f"line {lineno}: expected 'id name R G B A', got {len(parts)} fields")
        try:
            lid = int(parts[0])
            rgba = [int(x) for x in parts[2:]]
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
        if lid < 0:
            raise ValidationError(f"line {lineno}: negative label id {lid}")
        if lid in entries:
            raise ValidationError(f"line {lineno}: duplicate label id {lid}")
        if any(c < 0 or c > 255 for c in rgba):
            raise ValidationError(f"line {lineno}: channel outside [0, 255]")
        entries[lid] = (parts[1], *rgba)
    if 0 in entries and entries[0][4] != 0:
        raise ValidationError("label 0 must have alpha 0")
    return ColorScheme(entries)


def format_color_scheme(scheme: ColorScheme) -> str:
    lines = []
    for lid in sorted(scheme.entries):
        name, r, g, b, a = scheme.entries[lid]
        lines.append(f"{lid} {name} {r} {g} {b} {a}")
    return "\n".join(lines) + "\n"
