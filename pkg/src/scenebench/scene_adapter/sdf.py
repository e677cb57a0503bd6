"""Reader for the SDF subset emitted by the scene synthesizer.

Recognized structure::

    <sdf><world name=...>
      <model name=...><pose>x y z roll pitch yaw</pose>
        <link><pose/>?<visual><pose/>?
          <geometry> <mesh><uri/><scale/></mesh> | <box><size/></box>
                     | <cylinder><radius/><length/></cylinder> </geometry>
          <material><diffuse/><script><uri/></script>?<pbr><metal>...</metal></pbr>?</material>
      </model>
      <light type="point|directional"><pose/><diffuse/><direction/><attenuation/></light>
    </world></sdf>

Anything else is skipped with a warning.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from typing import Iterable

from ..errors import InputError, SceneFieldError, SceneParseError, SceneStructureError
from .geometry import Pose, rotate
from .model import AssetManifest, Geometry, Material, SourceLight, SourceModel, SourceScene

log = logging.getLogger(__name__)


def _floats(text: str | None, n: int | tuple[int, ...], what: str, owner: str) -> list[float]:
    tokens = (text or "").split()
    allowed = (n,) if isinstance(n, int) else n
    try:
        vals = [float(t) for t in tokens]
    except ValueError:
        raise SceneFieldError(f"{owner}: <{what}> has non-numeric tokens: {text!r}") from None
    if len(vals) not in allowed:
        raise SceneFieldError(
            f"{owner}: <{what}> needs {' or '.join(map(str, allowed))} numbers, got {len(vals)}"
        )
    return vals


def _pose(elem: ET.Element | None, owner: str) -> Pose:
    if elem is None:
        return Pose()
    return Pose.from_xyz_rpy(_floats(elem.text, 6, "pose", owner))


def _text(elem: ET.Element | None, path: str) -> str | None:
    if elem is None:
        return None
    found = elem.find(path)
    if found is None or found.text is None:
        return None
    return found.text.strip()


def _geometry(geom: ET.Element, owner: str, warnings: list[str]) -> Geometry | None:
    try:
        if (mesh := geom.find("mesh")) is not None:
            uri = _text(mesh, "uri")
            if not uri:
                raise SceneFieldError(f"{owner}: <mesh> without <uri>")
            scale_el = mesh.find("scale")
            scale = (
                tuple(_floats(scale_el.text, 3, "scale", owner)) if scale_el is not None else (1.0, 1.0, 1.0)
            )
            return Geometry("mesh", uri=uri, scale=scale)
        if (box := geom.find("box")) is not None:
            return Geometry("box", size=tuple(_floats(_text(box, "size"), 3, "size", owner)))
        if (cyl := geom.find("cylinder")) is not None:
            radius = _floats(_text(cyl, "radius"), 1, "radius", owner)[0]
            length = _floats(_text(cyl, "length"), 1, "length", owner)[0]
            return Geometry("cylinder", radius=radius, length=length)
    except InputError as exc:
        raise SceneFieldError(f"{owner}: {exc}") from None
    kinds = ",".join(c.tag for c in geom) or "empty"
    warnings.append(f"{owner}: unsupported geometry ({kinds}) ignored")
    return None


def _material(mat: ET.Element | None, owner: str) -> Material | None:
    if mat is None:
        return None
    diffuse = mat.find("diffuse")
    color = None
    if diffuse is not None:
        vals = _floats(diffuse.text, (3, 4), "diffuse", owner)
        color = tuple(vals) if len(vals) == 4 else (*vals, 1.0)
    texture = _text(mat, "script/uri") or _text(mat, "pbr/metal/albedo_map")
    pbr = None
    metal = mat.find("pbr/metal")
    if metal is not None:
        pbr = {
            "metallic": float(_text(metal, "metalness") or 0.0),
            "roughness": float(_text(metal, "roughness") or 1.0),
        }
    try:
        return Material(base_color=color, texture_uri=texture, pbr=pbr)
    except InputError as exc:
        raise SceneFieldError(f"{owner}: {exc}") from None


def _model(elem: ET.Element, warnings: list[str]) -> SourceModel | None:
    name = elem.get("name")
    if not name:
        raise SceneStructureError("<model> without a name attribute")
    owner = f"model {name!r}"
    pose = _pose(elem.find("pose"), owner)
    link = elem.find("link")
    visual = link.find("visual") if link is not None else None
    if visual is None:
        warnings.append(f"{owner}: no <link>/<visual>, skipped")
        return None
    pose = pose.compose(_pose(link.find("pose"), owner)).compose(_pose(visual.find("pose"), owner))
    geom_el = visual.find("geometry")
    if geom_el is None:
        warnings.append(f"{owner}: visual without <geometry>, skipped")
        return None
    geometry = _geometry(geom_el, owner, warnings)
    if geometry is None:
        return None
    return SourceModel(
        name=name,
        pose=pose,
        geometry=geometry,
        material=_material(visual.find("material"), owner),
        raw_label=name,
    )


def _light(elem: ET.Element, warnings: list[str]) -> SourceLight | None:
    name = elem.get("name", "")
    kind = elem.get("type", "point")
    owner = f"light {name!r}"
    if kind not in ("point", "directional"):
        warnings.append(f"{owner}: light type {kind!r} ignored")
        return None
    pose = _pose(elem.find("pose"), owner)
    diffuse = elem.find("diffuse")
    color = (1.0, 1.0, 1.0)
    if diffuse is not None:
        color = tuple(_floats(diffuse.text, (3, 4), "diffuse", owner)[:3])
    direction = (0.0, 0.0, -1.0)
    if (d := elem.find("direction")) is not None:
        direction = tuple(_floats(d.text, 3, "direction", owner))
    direction = rotate(pose.orientation, direction)
    intensity = 1.0
    if (i := _text(elem, "intensity")) is not None:
        intensity = _floats(i, 1, "intensity", owner)[0]
    elif (c := _text(elem, "attenuation/constant")) is not None:
        constant = _floats(c, 1, "constant", owner)[0]
        if constant > 0:
            intensity = 1.0 / constant
    return SourceLight(
        name=name,
        kind=kind,
        position=pose.position,
        direction=direction,
        color=color,
        intensity=max(0.0, intensity),
    )


def parse_scene_source(
    document: str | bytes,
    asset_manifest: AssetManifest | Iterable[str] | None = None,
    name: str | None = None,
) -> SourceScene:
    """Parse an SDF document into a :class:`SourceScene`.

    Raises:
        SceneParseError: malformed XML (carries line and column).
        SceneFieldError: a numeric field with the wrong token count.
        SceneStructureError: duplicate or missing model names.
    """
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        line, col = exc.position
        raise SceneParseError(f"malformed scene XML: {exc.msg}", line, col + 1) from None

    if root.tag == "world":
        container = root
    else:
        container = root.find("world")
        if container is None:
            container = root

    warnings: list[str] = []
    models: list[SourceModel] = []
    lights: list[SourceLight] = []
    seen: set[str] = set()
    unknown: set[str] = set()
    for child in container:
        if not isinstance(child.tag, str):
            continue
        if child.tag == "model":
            m = _model(child, warnings)
            if m is None:
                continue
            if m.name in seen:
                raise SceneStructureError(f"duplicate model name {m.name!r}")
            seen.add(m.name)
            models.append(m)
        elif child.tag == "light":
            light = _light(child, warnings)
            if light is not None:
                lights.append(light)
        elif child.tag not in unknown:
            unknown.add(child.tag)
            warnings.append(f"unsupported element <{child.tag}> ignored")

    if asset_manifest is not None:
        manifest = (
            asset_manifest
            if isinstance(asset_manifest, AssetManifest)
            else AssetManifest.from_dict({"assets": [{"uri": u, "exists": True} for u in asset_manifest]})
        )
        for m in models:
            if m.geometry.kind == "mesh" and not manifest.available(m.geometry.uri):
                warnings.append(f"model {m.name!r}: mesh {m.geometry.uri!r} not in asset manifest")

    for w in warnings:
        log.warning(w)
    scene_name = name or container.get("name") or "scene"
    return SourceScene(name=scene_name, models=tuple(models), lights=tuple(lights), warnings=tuple(warnings))

