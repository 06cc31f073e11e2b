"""
The three-stage pipeline on recorded responses
==============================================

Entity inference, translation and cleanup, run on one record of the
bundled synthetic dataset. Model calls are served from recorded fixtures,
so the result is the same on every machine and needs no network.
"""

from cas.domain import load_problem
from cas.harness import load_config, load_dataset
from cas.pipeline import run
from cas.resources import dataset_dir, default_aliases, models_config

config = load_config(models_config(), env={})
backend = config.make_backend()  # replay from the bundled fixtures
record = load_dataset(dataset_dir())[0]
problem = load_problem(record.problem_ref)

print("task:", record.task_prose)
print("reference:", ", ".join(map(str, record.reference)))

###############################################################################
# One summary, every configured model. Pretrained models are shown the
# action catalog; fine-tuned ones are not.

command = record.summaries[0].text
for model in config.models:
    result = run(
        backend,
        problem,
        command,
        model_id=model.model_id,
        aliases=default_aliases(),
        with_catalog=not model.finetuned,
        entity_model=config.entity_model,
    )
    print(f"\n--- {model.label} ({model.model_id}) ---")
    print(result.describe())
