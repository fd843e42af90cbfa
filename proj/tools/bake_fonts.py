#!/usr/bin/env python3
"""Bake the embedded bitmap glyph set.

Rasterizes a fixed list of TrueType faces (DejaVu / STIX / Computer Modern,
all under the Bitstream Vera or SIL OFL licenses) at a 24 px em size and
emits include/docmask/fontdata.hpp with coverage bitmaps, bearings and
advances. Run once when the face list changes; the generated header is
checked in so the library builds with no font assets installed.

Usage: python3 tools/bake_fonts.py [--fontdir DIR] [--out PATH]
"""

import argparse
import os

from PIL import Image, ImageDraw, ImageFont

EM = 24
CHARSET = [chr(c) for c in range(33, 127)]

# (file, face name, common pool)
FACES = [
    ("DejaVuSans.ttf", "sans", True),
    ("DejaVuSans-Bold.ttf", "sans-bold", True),
    ("DejaVuSerif.ttf", "serif", True),
    ("DejaVuSerif-Bold.ttf", "serif-bold", True),
    ("DejaVuSansMono.ttf", "mono", True),
    ("DejaVuSansMono-Bold.ttf", "mono-bold", True),
    ("STIXGeneral.ttf", "stix", True),
    ("cmr10.ttf", "cm-roman", True),
    ("DejaVuSans-Oblique.ttf", "sans-oblique", False),
    ("DejaVuSerif-Italic.ttf", "serif-italic", False),
    ("DejaVuSansMono-Oblique.ttf", "mono-oblique", False),
    ("cmtt10.ttf", "cm-typewriter", False),
]

PAD = 16


def bake_face(path, name, common):
    font = ImageFont.truetype(path, EM)
    ascent, descent = font.getmetrics()
    glyphs = []
    blob = bytearray()
    for ch in CHARSET:
        w = int(font.getlength(ch) * 16 + 0.5)
        canvas = Image.new("L", (EM * 3 + 2 * PAD, EM * 3 + 2 * PAD), 0)
        draw = ImageDraw.Draw(canvas)
        draw.text((PAD, PAD), ch, fill=255, font=font)
        bbox = canvas.getbbox()
        if bbox is None:
            raise RuntimeError(f"{name}: blank glyph for {ch!r}")
        x0, y0, x1, y1 = bbox
        bm = canvas.crop(bbox)
        glyphs.append(
            dict(ch=ord(ch), w=x1 - x0, h=y1 - y0, bx=x0 - PAD, by=y0 - PAD,
                 adv=w, off=len(blob)))
        blob.extend(bm.tobytes())
    space_adv = int(font.getlength(" ") * 16 + 0.5)
    return dict(name=name, common=common, ascent=ascent, descent=descent,
                space_adv=space_adv, glyphs=glyphs, blob=bytes(blob))


def emit(faces, out):
    lines = []
    w = lines.append
    w("// Generated by tools/bake_fonts.py -- do not edit by hand.")
    w("// Glyph bitmaps rasterized from the DejaVu, STIX and Computer Modern")
    w("// font families; see LICENSE_FONTS for the upstream font licenses.")
    w("#pragma once")
    w("")
    w("namespace docmask::fontdata {")
    w("")
    w("struct RawGlyph {")
    w("  unsigned char ch;")
    w("  unsigned short w, h;")
    w("  short bearing_x, bearing_y;  // from pen position / cell top, at em size")
    w("  unsigned short advance_q4;   // horizontal advance, 1/16 px units")
    w("  unsigned int offset;         // into the face bitmap blob")
    w("};")
    w("")
    w("struct RawFace {")
    w("  const char* name;")
    w("  bool common;")
    w("  unsigned short em, ascent, descent;")
    w("  unsigned short space_advance_q4;")
    w("  unsigned int glyph_count;")
    w("  const RawGlyph* glyphs;")
    w("  const unsigned char* bits;")
    w("};")
    w("")
    for i, f in enumerate(faces):
        data = ",".join(str(b) for b in f["blob"])
        w(f"inline constexpr unsigned char kBits{i}[] = {{{data}}};")
        rows = ",".join(
            "{%d,%d,%d,%d,%d,%d,%d}" % (g["ch"], g["w"], g["h"], g["bx"],
                                        g["by"], g["adv"], g["off"])
            for g in f["glyphs"])
        w(f"inline constexpr RawGlyph kGlyphs{i}[] = {{{rows}}};")
        w("")
    w("inline constexpr RawFace kFaces[] = {")
    for i, f in enumerate(faces):
        w('  {"%s", %s, %d, %d, %d, %d, %d, kGlyphs%d, kBits%d},'
          % (f["name"], "true" if f["common"] else "false", EM, f["ascent"],
             f["descent"], f["space_adv"], len(f["glyphs"]), i, i))
    w("};")
    w(f"inline constexpr int kFaceCount = {len(faces)};")
    w("")
    w("}  // namespace docmask::fontdata")
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser()
    default_dir = None
    try:
        import matplotlib
        default_dir = os.path.join(os.path.dirname(matplotlib.__file__),
                                   "mpl-data", "fonts", "ttf")
    except ImportError:
        pass
    ap.add_argument("--fontdir", default=default_dir)
    ap.add_argument("--out", default=os.path.join(
        os.path.dirname(__file__), "..", "include", "docmask", "fontdata.hpp"))
    args = ap.parse_args()
    faces = [bake_face(os.path.join(args.fontdir, f), n, c)
             for f, n, c in FACES]
    emit(faces, args.out)
    total = sum(len(f["blob"]) for f in faces)
    print(f"baked {len(faces)} faces, {total} bitmap bytes -> {args.out}")


if __name__ == "__main__":
    main()
