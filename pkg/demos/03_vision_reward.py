"""Vision-centric reward: patch embeddings and multi-scale similarity.

For chart/web/SVG/plot/molecule records the model emits *code*; quality
is judged by rendering that code and comparing the result against the
ground-truth image. The comparison embeds a global thumbnail plus a grid
of local patches and mixes the cosine similarities:

    R = omega_global * s_global + omega_local * mean(patch similarities)

with every cosine clamped to [0, 1]. This script uses the deterministic
built-in embedding backend (8x8 box-filtered intensities), so it runs
without any model server.

Run:  python3 demos/03_vision_reward.py
"""

import numpy as np

from ocrscore import (
    VisionRewardConfig,
    cosine_similarity,
    detect_format,
    format_alignment_reward,
    make_patches,
    multiscale_vision_reward,
    resize_box,
    stub_embed,
    RasterImage,
)

rng = np.random.default_rng(7)

# ---------------------------------------------------------------------------
# 1. Some synthetic images
# ---------------------------------------------------------------------------
print("=" * 70)
print("1. Synthetic test images")
print("=" * 70)

def to_rgb(gray: np.ndarray) -> RasterImage:
    """Images are always (h, w, 3); replicate a grayscale plane."""
    return RasterImage.from_array(np.repeat(gray[:, :, None], 3, axis=2))


ramp = np.linspace(0, 255, 96).reshape(1, -1)
gt = to_rgb(np.repeat(ramp, 64, axis=0))                          # gradient
checker = to_rgb(
    255.0 * ((np.arange(64)[:, None] // 8 + np.arange(96)[None, :] // 8) % 2)
)


def noisy_copy(img: RasterImage, sigma: float) -> RasterImage:
    corrupted = img.pixels.astype(float) + rng.normal(0, sigma, img.pixels.shape)
    return RasterImage.from_array(np.clip(corrupted, 0, 255))


print(f"  ground truth gradient: {gt.pixels.shape}, checkerboard: "
      f"{checker.pixels.shape}")

# ---------------------------------------------------------------------------
# 2. Geometry: thumbnails and patch grids
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("2. Resize and patch grid")
print("=" * 70)

thumb = resize_box(gt, 10, 10)
print(f"  box-filter thumbnail: {gt.pixels.shape} -> {thumb.pixels.shape}")
patches = make_patches(gt, 3, 3)
print(f"  3x3 patch shapes    : {[p.pixels.shape[:2] for p in patches]}")
print("  (rows/cols that do not divide evenly push the remainder to the last"
      " patch)")

# ---------------------------------------------------------------------------
# 3. The embedding backend
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("3. Embeddings and cosine similarity")
print("=" * 70)

vec = stub_embed(gt)
print(f"  stub embedding: dim={vec.dim}, unit norm="
      f"{np.linalg.norm(vec.values):.6f}")
print(f"  cos(gradient, light noise)  = "
      f"{cosine_similarity(stub_embed(gt), stub_embed(noisy_copy(gt, 8))):.4f}")
print(f"  cos(gradient, checkerboard) = "
      f"{cosine_similarity(stub_embed(gt), stub_embed(checker)):.4f}")

# ---------------------------------------------------------------------------
# 4. The multi-scale reward
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("4. Multi-scale visual reward")
print("=" * 70)

cfg = VisionRewardConfig()   # omega 0.5/0.5, 3x3 grid, 224px thumbnail
print(f"  self-similarity        : "
      f"{multiscale_vision_reward(gt, gt, cfg, stub_embed):.6f}")
for sigma in (4, 16, 64):
    r = multiscale_vision_reward(noisy_copy(gt, sigma), gt, cfg, stub_embed)
    print(f"  noise sigma={sigma:<3}          : {r:.4f}")
print(f"  unrelated checkerboard : "
      f"{multiscale_vision_reward(checker, gt, cfg, stub_embed):.4f}")

# The weights trade off global layout against local detail; the reward is
# linear in omega, so sweeping it interpolates between the two pure scores.
pred = noisy_copy(gt, 32)
print("\n  omega_global sweep on the same pair:")
for og in (0.0, 0.25, 0.5, 0.75, 1.0):
    sweep = VisionRewardConfig(omega_global=og, omega_local=1.0 - og)
    print(f"    omega_global={og:<5} -> "
          f"{multiscale_vision_reward(pred, gt, sweep, stub_embed):.6f}")

# ---------------------------------------------------------------------------
# 5. Format alignment: is the code even the right kind?
# ---------------------------------------------------------------------------
print()
print("=" * 70)
print("5. Code-format detection")
print("=" * 70)

snippets = {
    "<svg xmlns='http://www.w3.org/2000/svg'><rect/></svg>": "svg",
    "<html><body><h1>Report</h1></body></html>": "html",
    "\\begin{tikzpicture}\\draw (0,0) -- (1,1);\\end{tikzpicture}": "latex_tikz",
    "import matplotlib.pyplot as plt\nplt.plot([1, 2, 3])": "python_plot",
    "from rdkit import Chem\nChem.MolFromSmiles('CCO')": "molecule_code",
}
for code, expected in snippets.items():
    got = detect_format(code)
    flat = " ".join(code.split())
    print(f"  {str(got):<14} <- {flat[:48]!r}")

svg_code = "<svg xmlns='http://www.w3.org/2000/svg'><rect/></svg>"
print(f"\n  format_alignment_reward(svg code, expected svg)  = "
      f"{format_alignment_reward(svg_code, 'svg'):.1f}")
print(f"  format_alignment_reward(svg code, expected html) = "
      f"{format_alignment_reward(svg_code, 'html'):.1f}")
