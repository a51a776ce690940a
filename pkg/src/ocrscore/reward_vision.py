"""Visual-fidelity rewards for rendered code outputs.

The multi-scale reward embeds fixed-size thumbnails (global view) and a
grid of image patches (local views), measures cosine similarity between
prediction and ground truth in embedding space, and mixes the two levels
with convex weights. Raw cosines are clamped to [0, 1] so the reward is a
well-formed reward signal.

The embedding backend is just a callable ``image -> EmbeddingVector``:
:func:`stub_embed` is the deterministic in-process backend used for tests
and offline runs; :class:`RemoteEmbedder` speaks the HTTP wire protocol
(POST PNG to ``{endpoint}/embed``, health probe at ``{endpoint}/health``)
behind which a real encoder can live.

Also here: the binary format-alignment reward and the external renderer
harness whose outcomes feed the execution success rate.
"""

from __future__ import annotations

import io
import re
import shlex
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import requests
from PIL import Image, UnidentifiedImageError

from .errors import ConfigError, ContractError, InputError, TransportError

PYTHON_PLOT = "python_plot"
HTML = "html"
SVG = "svg"
LATEX_TIKZ = "latex_tikz"
MOLECULE_CODE = "molecule_code"
CODE_FORMATS = (PYTHON_PLOT, HTML, SVG, LATEX_TIKZ, MOLECULE_CODE)


@dataclass(frozen=True, eq=False)
class RasterImage:
    """8-bit RGB image; pixel buffer is (height, width, 3) and read-only."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        pixels = self.pixels
        if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
            raise ContractError("pixels must be a (h, w, 3) uint8 array")
        if pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ContractError("image must have positive dimensions")
        pixels.flags.writeable = False

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @staticmethod
    def from_array(array: np.ndarray) -> "RasterImage":
        return RasterImage(np.ascontiguousarray(array, dtype=np.uint8))


def decode_image(data: bytes) -> RasterImage:
    """Decode PNG (or any Pillow-readable) bytes into an RGB image."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            rgb = img.convert("RGB")
            return RasterImage.from_array(np.asarray(rgb))
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise InputError(f"cannot decode image: {exc}") from exc


def load_image(path: str | Path) -> RasterImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read image {path!s}: {exc}") from exc
    return decode_image(data)


def encode_png(image: RasterImage) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(np.asarray(image.pixels)).save(buffer, format="PNG")
    return buffer.getvalue()


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """L2-normalized feature vector; rejects the zero vector."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        norm = float(np.linalg.norm(values))
        if norm <= 0.0 or not np.isfinite(norm):
            raise ContractError("embedding must have positive finite L2 norm")
        values = values / norm
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


EmbeddingBackend = Callable[[RasterImage], EmbeddingVector]


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """dot(u, v) / (|u||v|), clamped into [-1, 1] against float error."""
    if u.dim != v.dim:
        raise ContractError(f"dimension mismatch: {u.dim} vs {v.dim}")
    denom = float(np.linalg.norm(u.values) * np.linalg.norm(v.values))
    return float(np.clip(np.dot(u.values, v.values) / denom, -1.0, 1.0))


def _block_edges(src: int, dst: int) -> tuple[np.ndarray, np.ndarray]:
    # never-empty blocks: for dst > src the same source pixel repeats
    bounds = (np.arange(dst + 1, dtype=np.int64) * src) // dst
    lo = bounds[:-1]
    hi = np.maximum(bounds[1:], lo + 1)
    return lo, hi


def _box_means(channel: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Box-filter resample of one float channel via an integral image."""
    h, w = channel.shape
    integral = np.zeros((h + 1, w + 1))
    np.cumsum(np.cumsum(channel, axis=0), axis=1, out=integral[1:, 1:])
    r0, r1 = _block_edges(h, out_h)
    c0, c1 = _block_edges(w, out_w)
    sums = (
        integral[np.ix_(r1, c1)]
        - integral[np.ix_(r0, c1)]
        - integral[np.ix_(r1, c0)]
        + integral[np.ix_(r0, c0)]
    )
    areas = np.outer(r1 - r0, c1 - c0)
    return sums / areas


def resize_box(image: RasterImage, width: int, height: int) -> RasterImage:
    """Deterministic box-filter resize to exactly width x height."""
    if width < 1 or height < 1:
        raise ContractError("target size must be positive")
    pixels = image.pixels.astype(np.float64)
    out = np.stack(
        [_box_means(pixels[:, :, c], height, width) for c in range(3)], axis=2
    )
    return RasterImage.from_array(np.clip(np.rint(out), 0, 255))


def make_patches(
    image: RasterImage, grid_rows: int, grid_cols: int
) -> list[RasterImage]:
    """Tile the image into grid_rows x grid_cols patches, row-major.

    Remainder pixels go to the last row/column of patches. Requires the
    image to be at least as large as the grid.
    """
    if grid_rows < 1 or grid_cols < 1:
        raise ContractError("grid must be at least 1x1")
    if image.height < grid_rows or image.width < grid_cols:
        raise ContractError(
            f"image {image.width}x{image.height} smaller than "
            f"{grid_cols}x{grid_rows} grid"
        )
    row_step = image.height // grid_rows
    col_step = image.width // grid_cols
    row_edges = [r * row_step for r in range(grid_rows)] + [image.height]
    col_edges = [c * col_step for c in range(grid_cols)] + [image.width]
    patches = []
    for r in range(grid_rows):
        for c in range(grid_cols):
            block = image.pixels[
                row_edges[r] : row_edges[r + 1], col_edges[c] : col_edges[c + 1]
            ]
            patches.append(RasterImage(block))
    return patches


@dataclass(frozen=True)
class VisionRewardConfig:
    """Weights and geometry of the multi-scale reward.

    omega_global + omega_local must equal 1; defaults follow the
    documented convention (equal weights, 3x3 grid, 224px thumbnails).
    """

    omega_global: float = 0.5
    omega_local: float = 0.5
    grid_rows: int = 3
    grid_cols: int = 3
    thumb_size: int = 224

    def __post_init__(self) -> None:
        if self.omega_global < 0 or self.omega_local < 0:
            raise ContractError("weights must be nonnegative")
        if abs(self.omega_global + self.omega_local - 1.0) > 1e-9:
            raise ContractError("omega_global + omega_local must equal 1")
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ContractError("patch grid must be at least 1x1")
        if self.thumb_size < 1:
            raise ContractError("thumbnail size must be positive")


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def multiscale_vision_reward(
    pred_img: RasterImage,
    gt_img: RasterImage,
    cfg: VisionRewardConfig,
    backend: EmbeddingBackend,
) -> float:
    """Convex mix of global thumbnail similarity and mean patch similarity.

    Each cosine similarity is clamped to [0, 1] before mixing, so the
    result is always a reward in [0, 1].
    """
    pred_thumb = resize_box(pred_img, cfg.thumb_size, cfg.thumb_size)
    gt_thumb = resize_box(gt_img, cfg.thumb_size, cfg.thumb_size)
    s_global = _clamp01(cosine_similarity(backend(pred_thumb), backend(gt_thumb)))
    pred_patches = make_patches(pred_img, cfg.grid_rows, cfg.grid_cols)
    gt_patches = make_patches(gt_img, cfg.grid_rows, cfg.grid_cols)
    locals_ = [
        _clamp01(cosine_similarity(backend(p), backend(g)))
        for p, g in zip(pred_patches, gt_patches)
    ]
    s_local = sum(locals_) / len(locals_)
    return cfg.omega_global * s_global + cfg.omega_local * s_local


_STUB_SIDE = 8


def stub_embed(image: RasterImage) -> EmbeddingVector:
    """Deterministic in-process embedding backend.

    Box-averages the grayscale image to 8x8, flattens to 64 values, and
    mean-centers before L2 normalization. Constant images, whose centered
    vector would be zero, map to the canonical unit vector with all 64
    components equal to 1/8.
    """
    gray = image.pixels.astype(np.float64).mean(axis=2)
    cells = _box_means(gray, _STUB_SIDE, _STUB_SIDE).reshape(-1)
    centered = cells - cells.mean()
    norm = float(np.linalg.norm(centered))
    if norm < 1e-12:
        return EmbeddingVector(np.full(_STUB_SIDE * _STUB_SIDE, 1.0 / _STUB_SIDE))
    return EmbeddingVector(centered / norm)


class RemoteEmbedder:
    """HTTP client for an external embedding service.

    Wire protocol: ``POST {endpoint}/embed`` with a PNG body returns
    ``{"dim": int, "values": [float, ...]}``; ``GET {endpoint}/health``
    returns ``{"dim": int}``. Vectors are L2-normalized on receipt.
    Instances are shareable across scorer threads; ``max_in_flight``
    bounds concurrent requests.
    """

    def __init__(
        self,
        endpoint: str,
        timeout: float = 10.0,
        retries: int = 2,
        max_in_flight: int = 4,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self._session = requests.Session()
        self._gate = threading.Semaphore(max_in_flight)
        self._advertised_dim: int | None = None

    def health(self) -> int:
        """Probe the backend; returns the advertised embedding dimension."""
        try:
            response = self._session.get(
                f"{self.endpoint}/health", timeout=self.timeout
            )
            response.raise_for_status()
            dim = int(response.json()["dim"])
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise TransportError(f"health probe failed: {exc}") from exc
        self._advertised_dim = dim
        return dim

    def __call__(self, image: RasterImage) -> EmbeddingVector:
        payload = encode_png(image)
        attempts = self.retries + 1
        last_error: Exception | None = None
        for _ in range(attempts):
            with self._gate:
                try:
                    response = self._session.post(
                        f"{self.endpoint}/embed",
                        data=payload,
                        headers={"Content-Type": "image/png"},
                        timeout=self.timeout,
                    )
                except requests.RequestException as exc:
                    last_error = exc
                    continue
            if response.status_code != 200:
                last_error = TransportError(f"status {response.status_code}")
                continue
            try:
                body = response.json()
                dim = int(body["dim"])
                values = np.asarray(body["values"], dtype=np.float64)
            except (ValueError, KeyError, TypeError) as exc:
                raise TransportError(f"malformed embedding response: {exc}") from exc
            expected = self._advertised_dim
            if values.shape[0] != dim or (expected is not None and dim != expected):
                raise TransportError(
                    f"dimension mismatch: expected {expected or dim}, "
                    f"got {values.shape[0]}"
                )
            return EmbeddingVector(values)
        raise TransportError(
            f"embedding request failed after {attempts} attempts: {last_error}"
        )


_XML_PROLOG = re.compile(r"\s*(<\?xml[^>]*\?>|<!--.*?-->|<!DOCTYPE[^>]*>)", re.S | re.I)

_HTML_TAGS = (
    "html", "head", "body", "div", "span", "p", "table", "ul", "ol", "li",
    "a", "h1", "h2", "h3", "h4", "h5", "h6", "section", "header", "footer",
    "nav", "form", "input", "button", "img", "style", "title", "br",
)

_PLOT_IMPORTS = ("matplotlib", "pyplot", "plotly", "seaborn", "pylab")
_PLOT_CALLS = (
    ".plot(", ".bar(", ".barh(", ".scatter(", ".pie(", ".hist(", ".imshow(",
    ".boxplot(", ".fill_between(", ".savefig(", ".show(", ".errorbar(",
    ".contour(", ".pcolormesh(",
)
_MOLECULE_SIGNATURES = (
    "from rdkit", "import rdkit", "Chem.MolFromSmiles", "MolFromMolBlock",
    "Draw.MolToImage", "MolToFile", "AllChem.",
)


def detect_format(code: str) -> str | None:
    """Classify code as one of CODE_FORMATS via ordered signature checks;
    first match wins, None when nothing matches."""
    stripped = code
    while True:
        m = _XML_PROLOG.match(stripped)
        if not m:
            break
        stripped = stripped[m.end():]
    if stripped.lstrip().lower().startswith("<svg"):
        return SVG
    lower = code.lower()
    if "<html" in lower or "<!doctype" in lower:
        return HTML
    distinct = sum(
        1 for tag in _HTML_TAGS if re.search(rf"<{tag}[\s>/]", lower) is not None
    )
    if distinct >= 2:
        return HTML
    if "\\begin{tikzpicture}" in code or "\\documentclass" in code:
        return LATEX_TIKZ
    has_import = any(
        re.search(rf"(^|\n)\s*(import|from)\s+[\w.]*{name}", code) is not None
        for name in _PLOT_IMPORTS
    )
    if has_import and any(call in code for call in _PLOT_CALLS):
        return PYTHON_PLOT
    if any(sig in code for sig in _MOLECULE_SIGNATURES):
        return MOLECULE_CODE
    return None


def format_alignment_reward(code: str, expected: str) -> float:
    """1.0 when the detector classifies ``code`` as ``expected``, else 0.0."""
    if expected not in CODE_FORMATS:
        raise ContractError(f"unknown code format {expected!r}")
    return 1.0 if detect_format(code) == expected else 0.0


_INPUT_SUFFIX = {
    PYTHON_PLOT: ".py",
    HTML: ".html",
    SVG: ".svg",
    LATEX_TIKZ: ".tex",
    MOLECULE_CODE: ".py",
}


@dataclass(frozen=True)
class RenderResult:
    """Outcome of one renderer invocation; failures feed the exec rate."""

    success: bool
    image: RasterImage | None = None
    detail: str = ""


def render_via_command(
    code: str,
    fmt: str,
    cmd_template: str,
    workdir: str | Path,
    timeout: float = 30.0,
) -> RenderResult:
    """Render ``code`` with an external command.

    The template must contain ``{input}`` and ``{output}`` placeholders.
    Success means exit status 0 and a decodable output image. Timeouts and
    nonzero exits are execution failures (counted against the model);
    a missing renderer binary or bad template is a configuration error.
    """
    if fmt not in CODE_FORMATS:
        raise ConfigError(f"unknown code format {fmt!r}")
    if "{input}" not in cmd_template or "{output}" not in cmd_template:
        raise ConfigError(
            f"renderer template for {fmt!r} must contain {{input}} and {{output}}"
        )
    workdir = Path(workdir)
    input_path = workdir / f"render_input{_INPUT_SUFFIX[fmt]}"
    output_path = workdir / "render_output.png"
    input_path.write_text(code, encoding="utf-8")
    command = cmd_template.replace("{input}", str(input_path)).replace(
        "{output}", str(output_path)
    )
    argv = shlex.split(command)
    if not argv:
        raise ConfigError(f"empty renderer command for {fmt!r}")
    try:
        proc = subprocess.run(
            argv, cwd=workdir, capture_output=True, timeout=timeout
        )
    except subprocess.TimeoutExpired:
        return RenderResult(False, detail=f"timeout after {timeout}s")
    except FileNotFoundError as exc:
        raise ConfigError(f"renderer binary not found: {argv[0]}") from exc
    if proc.returncode != 0:
        return RenderResult(False, detail=f"exit status {proc.returncode}")
    if not output_path.exists():
        return RenderResult(False, detail="renderer produced no output image")
    try:
        image = decode_image(output_path.read_bytes())
    except InputError:
        return RenderResult(False, detail="output image does not decode")
    return RenderResult(True, image=image)
