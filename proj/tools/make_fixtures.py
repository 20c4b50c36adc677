#!/usr/bin/env python3
"""Writes the offline corpora, caches and traces under data/.

The canonical spec files are produced afterwards with `mowa canonicalize`.
"""
import hashlib
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"
FETCHED_AT = "2026-01-15T10:00:00Z"

MUSEUM_SITE = "https://museo.fcnym.unlp.edu.ar/beagle/"

# (name, x, y, description)
PIECES = [
    ("Toxodon", 4, 4,
     "Skull of Toxodon platensis, the heavy hoofed grazer whose remains Darwin bought for eighteen pence near Mercedes in 1833."),
    ("Glyptodon", 10, 5,
     "Armoured carapace of Glyptodon, a giant relative of armadillos that weighed close to two tonnes."),
    ("Megatherium", 16, 4,
     "Mounted skeleton of Megatherium americanum, the elephant-sized ground sloth described from the Pampas."),
    ("Mylodon", 16, 11,
     "Lower jaw and limb bones of Mylodon darwinii, the ground sloth named in honour of Darwin."),
    ("Macrauchenia", 10, 12,
     "Partial skeleton of Macrauchenia patachonica, a long-necked litoptern Darwin collected at Puerto San Julian."),
    ("Scelidotherium", 4, 13,
     "Skull of Scelidotherium leptocephalum, a long-snouted ground sloth found at Punta Alta."),
    ("Doedicurus", 4, 20,
     "Tail club of Doedicurus clavicaudatus, a glyptodont whose spiked tail could break bone."),
    ("Lestodon", 11, 21,
     "Skeleton of Lestodon armatus, one of the largest sloths of the South American Pleistocene."),
    ("Panochthus", 18, 20,
     "Carapace of Panochthus tuberculatus with its characteristic rosette-patterned osteoderms."),
    ("Smilodon", 26, 21,
     "Skull of Smilodon populator, the largest of the sabre-toothed cats, with canines over twenty centimetres long."),
    ("Hippidion", 32, 16,
     "Skeleton of Hippidion principale, a stocky native horse that vanished at the end of the last ice age."),
    ("Stegomastodon", 34, 8,
     "Tusks and molars of Stegomastodon, a gomphothere that reached South America during the Great American Interchange."),
]


def wiki_url(name):
    return f"https://en.wikipedia.org/wiki/{name}"


def qr_code(name):
    return f"http://en.qrwp.org/{name}"


def museum_url(name):
    return f"{MUSEUM_SITE}{name.lower()}.html"


def pic_url(name):
    return f"{MUSEUM_SITE}img/{name.lower()}.jpg"


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def wiki_page(name):
    return f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{name} - Wikipedia</title>
</head>
<body>
<div id="content">
<h1 id="firstHeading" class="firstHeading">{name}</h1>
<div id="bodyContent">
<div id="siteSub">From Wikipedia, the free encyclopedia</div>
<div id="mw-content-text">
<p><b>{name}</b> is an extinct genus of South American mammal known from Pleistocene deposits.</p>
<h2>Description</h2>
<p>Like other members of its group, {name} is known mainly from bones recovered in Argentina, Uruguay and southern Brazil.</p>
<h2>Discovery</h2>
<p>Fossils were collected in the Pampas region during the nineteenth century &amp; later described by Richard Owen.</p>
</div>
</div>
</div>
<div id="footer"><ul><li>Text is available under the Creative Commons Attribution-ShareAlike License.</li></ul></div>
</body>
</html>
"""


def museum_page(name, desc):
    return f"""<!DOCTYPE html>
<html lang="es">
<head>
<meta charset="utf-8">
<title>{name} | Museo de La Plata</title>
</head>
<body>
<header><nav><a href="{MUSEUM_SITE}">El viaje del Beagle</a></nav></header>
<main>
<article class="piece-sheet">
<h2 class="piece-name">{name}</h2>
<img class="piece" src="{pic_url(name)}" alt="{name}">
<p class="piece-desc">
  {desc}
</p>
<p class="piece-room">Sala de Paleontologia</p>
</article>
</main>
</body>
</html>
"""


def cache_file(url):
    return hashlib.sha256(url.encode()).hexdigest()[:16] + ".html"


def write_cache(directory, pages):
    index = {}
    for url, body in pages.items():
        name = cache_file(url)
        write(directory / name, body)
        index[url] = {"file": name, "fetched_at": FETCHED_AT}
    write(directory / "index.json", json.dumps(dict(sorted(index.items())), indent=2) + "\n")


def write_trace(path, events):
    write(path, "".join(json.dumps(e, separators=(",", ":")) + "\n" for e in events))


def museum():
    base = ROOT / "museum"
    corpus = base / "corpus"
    manifest = {}
    for name, *_ in PIECES:
        rel = f"pages/{name.lower()}.html"
        write(corpus / rel, wiki_page(name))
        manifest[wiki_url(name)] = rel
    write(corpus / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    write_cache(corpus / "cache", {museum_url(n): museum_page(n, d) for n, _, _, d in PIECES})

    pois = []
    for i, (name, x, y, _) in enumerate(PIECES, start=1):
        pois.append(
            f'    <poi id="p{i}" name="{name}" x="{x}" y="{y}" order="{i}" target-url="{wiki_url(name)}" code="{qr_code(name)}">\n'
            f'      <prop name="poi-pic" source="extract" url="{museum_url(name)}" xpath="//img[@class=\'piece\']" mode="attr:src"/>\n'
            f'      <prop name="poi-desc" source="extract" url="{museum_url(name)}" xpath="//p[@class=\'piece-desc\']" mode="text"/>\n'
            f"    </poi>\n")
    links = "".join(f'    <link from="p{i}" to="p{i + 1}"/>\n' for i in range(1, len(PIECES)))
    spec = f"""<?xml version="1.0" encoding="UTF-8"?>
<mowa-app version="1" name="Beagle tour" ns="ar.edu.unlp.museo.beagle" filename="beagle-tour" locale="en">
  <context-types>
    <context-type kind="location"/>
  </context-types>
  <sensors>
    <sensor id="qr" kind="qr" context-type="location"/>
    <sensor id="gps" kind="gps" context-type="location" radius-m="2"/>
  </sensors>
  <space kind="floorplan" image="floorplan.svg" width="40" height="30">
{''.join(pois)}{links}  </space>
  <layers>
    <layer id="tour" target="url" value="poi:target-url">
      <augmenter kind="poi-info-panel" anchor="//h1[@id='firstHeading']" position="after">
        <param name="title" bind="poi.name"/>
        <param name="description" bind="poi.prop:poi-desc"/>
        <param name="image-url" bind="poi.prop:poi-pic"/>
      </augmenter>
      <augmenter kind="hypermedia-nav" anchor="//div[@id='mw-content-text']" position="first_child"/>
    </layer>
  </layers>
  <rules>
    <rule sensor="qr" layer="tour"/>
    <rule sensor="gps" layer="tour"/>
  </rules>
</mowa-app>
"""
    write(base / "source.mowa.xml", spec)

    rooms = [(1, 1, 20, 15), (20, 1, 39, 15), (1, 16, 20, 29), (20, 16, 39, 29)]
    svg = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 40 30" width="800" height="600">',
           '<rect x="0" y="0" width="40" height="30" fill="#f4f1ea"/>']
    for x0, y0, x1, y1 in rooms:
        svg.append(f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" fill="none" stroke="#555" stroke-width="0.2"/>')
    svg.append("</svg>")
    write(base / "floorplan.svg", "\n".join(svg) + "\n")

    in_order = [{"t": 1000 * i, "kind": "qr", "payload": qr_code(n)} for i, (n, *_rest) in enumerate(PIECES, start=1)]
    write_trace(base / "traces" / "qr-in-order.jsonl", in_order)

    names = [p[0] for p in PIECES]
    out_of_order = [
        {"t": 1000, "kind": "qr", "payload": qr_code(names[1])},
        {"t": 2000, "kind": "qr", "payload": qr_code(names[0])},
        {"t": 3000, "kind": "qr", "payload": qr_code(names[1])},
        {"t": 4000, "kind": "qr", "payload": qr_code(names[3])},
        {"t": 5000, "kind": "qr", "payload": "http://en.qrwp.org/Not_in_the_tour"},
    ]
    write_trace(base / "traces" / "qr-out-of-order.jsonl", out_of_order)

    walk = []
    t = 0
    prev = None
    for name, x, y, _ in PIECES:
        if prev is not None:
            t += 500
            # halfway between two pieces is outside the 2-unit radius of both
            walk.append({"t": t, "kind": "gps", "lat": (prev[1] + y) / 2, "lon": (prev[0] + x) / 2})
        t += 500
        walk.append({"t": t, "kind": "gps", "lat": y + 0.5, "lon": x - 0.5})
        prev = (x, y)
    write_trace(base / "traces" / "gps-walk.jsonl", walk)

    rubric = {
        "reference": "beagle-tour.mowa.xml",
        "expected_poi_count": 12,
        "expected_link_count": 11,
        "required_props": ["poi-desc", "poi-pic"],
        "tolerance": 0.05,
    }
    write(base / "rubric.json", json.dumps(rubric, indent=2) + "\n")


def media():
    base = ROOT / "media"
    corpus = base / "corpus"
    video_url = "https://www.youtube.com/watch?v=beagle-voyage"
    page = f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>The voyage of the Beagle - YouTube</title>
</head>
<body>
<div id="page">
<h1 class="title">The voyage of the Beagle</h1>
<div id="player">
<video class="main-video" src="https://www.youtube.com/media/beagle-voyage.mp4" controls></video>
</div>
<div id="related">
<video class="preview" src="https://www.youtube.com/media/galapagos.mp4" muted></video>
</div>
</div>
</body>
</html>
"""
    write(corpus / "pages" / "beagle-voyage.html", page)
    write(corpus / "manifest.json", json.dumps({video_url: "pages/beagle-voyage.html"}, indent=2) + "\n")

    spec = """<?xml version="1.0" encoding="UTF-8"?>
<mowa-app name="Noise aware video" ns="org.example.mowa.noise" filename="noise-video" version="1" locale="en">
  <context-types>
    <context-type kind="noise"/>
  </context-types>
  <sensors>
    <sensor id="mic" kind="db" context-type="noise"/>
  </sensors>
  <space kind="scalar_scale">
    <band id="quiet" label="Quiet" min="0" max="40" units="dB"/>
    <band id="normal" label="Normal" min="40" max="70" units="dB"/>
    <band id="noisy" label="Noisy" min="70" max="130" units="dB"/>
  </space>
  <layers>
    <layer id="volume" target="pattern" value="https://www.youtube.com/watch*">
      <augmenter kind="media-volume-adapter" anchor="//div[@id='player']" position="after">
        <param name="media-xpath" value="//video[@class='main-video']"/>
        <param name="volume:quiet" value="0.3"/>
        <param name="volume:normal" value="0.6"/>
        <param name="volume:noisy" value="0.9"/>
      </augmenter>
      <augmenter kind="scalar-badge" anchor="//h1" position="after">
        <param name="label-prefix" value="Noise: "/>
      </augmenter>
    </layer>
  </layers>
  <rules>
    <rule sensor="mic" layer="volume"/>
  </rules>
</mowa-app>
"""
    write(base / "source.mowa.xml", spec)
    trace = [
        {"t": 0, "kind": "nav", "url": video_url},
        {"t": 1000, "kind": "scalar", "sensor": "mic", "value": 32.5},
        {"t": 2000, "kind": "scalar", "sensor": "mic", "value": 35.0},
        {"t": 3000, "kind": "scalar", "sensor": "mic", "value": 39.9},
        {"t": 4000, "kind": "scalar", "sensor": "mic", "value": 71.0},
        {"t": 5000, "kind": "scalar", "sensor": "mic", "value": 84.2},
        {"t": 6000, "kind": "scalar", "sensor": "mic", "value": 70.0},
        {"t": 7000, "kind": "scalar", "sensor": "mic", "value": 55.0},
    ]
    write_trace(base / "traces" / "db-walk.jsonl", trace)


def main():
    museum()
    media()
    return 0


if __name__ == "__main__":
    sys.exit(main())
