"""
Full evaluation run
===================

Every record, model and summary goes through the pipeline; per-record
results are averaged over the three summaries and the models are compared
per measure. Equivalent to ``cas eval --out DIR``.
"""

import sys
import tempfile

from cas.harness import evaluate, load_config, load_dataset, problem_library, summary_text, write_report
from cas.resources import dataset_dir, default_aliases, models_config

config = load_config(models_config(), env={})
records = load_dataset(dataset_dir())
report = evaluate(
    records,
    config.models,
    problem_library(),
    config.make_backend(),
    aliases=default_aliases(),
    entity_model=config.entity_model,
    workers=config.workers,
)
sys.stdout.write(summary_text(report))

###############################################################################
# The same report as CSV files.

out = tempfile.mkdtemp(prefix="cas-report-")
for path in write_report(report, out):
    print("wrote", path)
