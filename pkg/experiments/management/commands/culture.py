import io
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from _culturesim.helpers import ConfigurationError
from culture.fitness import FitnessSpec, enumerate_landscape
from experiments import acceptance, writers
from experiments.config import load_config
from experiments.runner import run_plan

logger = logging.getLogger(__name__)

VALIDATION_ERROR = 1
IO_ERROR = 2


class Command(BaseCommand):
    help = "Run cultural evolution simulations and experiments."

    def add_arguments(self, parser):
        subcommands = parser.add_subparsers(dest="subcommand", required=True)

        run = subcommands.add_parser("run", help="Run one configuration.")
        run.add_argument("config")
        run.add_argument(
            "--seed",
            type=int,
            help=(
                "Master seed. Replicate r runs with derive_seed(SEED, 0, r), "
                "as written to runs.csv."
            ),
        )
        run.add_argument("--out")
        run.add_argument("--workers", type=int)

        sweep = subcommands.add_parser(
            "sweep", help="Run every variant of the configuration's sweeps."
        )
        sweep.add_argument("config")
        sweep.add_argument("--out")
        sweep.add_argument("--workers", type=int)

        oracle = subcommands.add_parser(
            "oracle", help="Write the fitness of all 729 actions as CSV."
        )
        oracle.add_argument("--fitness", choices=["F1", "F2"], default="F1")
        oracle.add_argument("--out")

        render = subcommands.add_parser(
            "snapshot-render", help="Print a snapshot as a glyph grid with a legend."
        )
        render.add_argument("snapshot")

        reproduce = subcommands.add_parser(
            "reproduce", help="Check the simulator's qualitative dynamics."
        )
        reproduce.add_argument(
            "--only",
            nargs="+",
            choices=[criterion.__name__ for criterion in acceptance.CRITERIA],
        )

    def handle(self, *args, **options):
        handler = getattr(self, f"handle_{options['subcommand'].replace('-', '_')}")
        try:
            handler(options)
        except ConfigurationError as e:
            logger.warning(f"Rejected configuration: {e}")
            raise CommandError(str(e), returncode=VALIDATION_ERROR)
        except OSError as e:
            raise CommandError(str(e), returncode=IO_ERROR)

    def _load(self, options, overrides=None):
        return load_config(options["config"], overrides=overrides)

    def _report(self, result):
        self.stdout.write(f"Wrote {len(result.files)} files to {result.out_dir}")
        for outcome in result.outcomes:
            final = outcome.result.metrics[-1]
            self.stdout.write(
                f"v{outcome.spec.variant} r{outcome.spec.replicate} "
                f"seed {outcome.spec.seed}: mean fitness {final.mean_fitness:.3f}, "
                f"diversity {final.diversity}"
            )

    def handle_run(self, options):
        overrides = {"seed": options["seed"]} if options["seed"] is not None else None
        plan = self._load(options, overrides)
        result = run_plan(
            plan, out_dir=options["out"], sweep=False, workers=options["workers"]
        )
        self._report(result)

    def handle_sweep(self, options):
        plan = self._load(options)
        result = run_plan(plan, out_dir=options["out"], workers=options["workers"])
        self._report(result)

    def handle_oracle(self, options):
        landscape = enumerate_landscape(FitnessSpec(kind=options["fitness"]))
        buffer = io.StringIO()
        writers.write_landscape_csv(buffer, landscape)
        if options["out"]:
            path = Path(options["out"])
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(buffer.getvalue(), encoding="utf-8")
            logger.info(f"Wrote {options['fitness']} landscape to {path}")
        else:
            self.stdout.write(buffer.getvalue(), ending="")

    def handle_snapshot_render(self, options):
        text = Path(options["snapshot"]).read_text(encoding="utf-8")
        try:
            rendered = writers.render_snapshot_legend(text)
        except ValueError as e:
            raise ConfigurationError(f"{options['snapshot']}: {e}")
        self.stdout.write(rendered, ending="")

    def handle_reproduce(self, options):
        criteria = acceptance.CRITERIA
        if options["only"]:
            criteria = [c for c in criteria if c.__name__ in options["only"]]
        results = acceptance.evaluate(criteria)
        for result in results:
            self.stdout.write(str(result))
        failed = [result.name for result in results if not result.passed]
        if failed:
            raise CommandError(
                f"{len(failed)} of {len(results)} checks failed: {', '.join(failed)}",
                returncode=VALIDATION_ERROR,
            )
        self.stdout.write(self.style.SUCCESS(f"All {len(results)} checks passed."))
