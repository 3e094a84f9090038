"""End-to-end pipeline at toy scale: presets -> CSVs -> figures.

Runs reduced-size versions of every preset the renderer consumes and then
draws all seven figure types. The full-scale equivalents are the CLI
presets with their defaults (see README); this script finishes in about a
minute.
"""

import os
import shutil
import sys

from muonlab import presets

OUT = os.path.join(os.path.dirname(__file__), "_pipeline_out")
CSV_DIR = os.path.join(OUT, "results")
FIG_DIR = os.path.join(OUT, "figures")

shutil.rmtree(OUT, ignore_errors=True)
os.makedirs(CSV_DIR)

print("running reduced presets into", CSV_DIR)
presets.run_fig2(CSV_DIR, base_seed=1, seeds=4, T=120)
presets.run_fig3(CSV_DIR, base_seed=1, seeds=4, T=120)
presets.run_fig4(CSV_DIR, base_seed=1, seeds=2000)
presets.run_fig5(CSV_DIR, base_seed=1, seeds=6, T=40)

try:
    from muonlab_figures.cli import main as render_main
except ImportError:
    print("muonlab-figures not installed; skipping rendering "
          "(pip install -e frontend/)")
    sys.exit(0)

code = render_main([CSV_DIR, FIG_DIR])
print("render_figures exit code:", code)
print("figures:", sorted(os.listdir(FIG_DIR)))
