#!/usr/bin/env python

import argparse
import json
import logging
import pathlib
import sys
from tempfile import mkdtemp

import pandas as pd

from otdro.bounds import build_bound_report
from otdro.config import ConfigBuilder, ConfigException
from otdro.exceptions import DroException
from otdro.factory import ProblemFactory
from otdro.oracle import (
    build_finite_instance,
    ot_primal_lp,
    otreg_primal_convex,
    weak_duality_check,
)
from otdro.runner import emit_plots, run_concentration, run_erm_experiment
from otdro.solvers import empirical_risk, solve_dual

OT_TOLERANCE = 1e-5
OTREG_TOLERANCE = 1e-3
DEFAULT_INSTANCES = 5
DEFAULT_POINTS_PER_AXIS = 5


def _output(path, default_name):
    if path is None:
        path = pathlib.Path(mkdtemp(prefix="dro_certify")) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def dual_value(args):
    document = ConfigBuilder.load_document(args.config)
    prob = ProblemFactory.create_problem(document)
    solution = solve_dual(prob)
    risk = empirical_risk(prob)
    result = dict(solution.to_dict(), empirical_risk=risk, n=prob.sample.n)
    out = _output(args.out, "result.json")
    out.write_text(json.dumps(result, sort_keys=True, indent=4))
    return out, solution.converged and solution.value >= risk - OT_TOLERANCE


def primal_check(args):
    document = ConfigBuilder.load_document(args.config)
    section = document.section("primal")
    instances = args.instances or (
        section.get("instances", DEFAULT_INSTANCES) if section else DEFAULT_INSTANCES
    )
    grid = (
        section.get("points_per_axis", DEFAULT_POINTS_PER_AXIS)
        if section
        else DEFAULT_POINTS_PER_AXIS
    )
    solver_cfg = ConfigBuilder.create_primal_config(section)

    rows = []
    for i, prob in enumerate(ProblemFactory.create_check_problems(document, instances)):
        solution = solve_dual(prob)
        inst = build_finite_instance(prob, grid, solution)
        if prob.divergence is None:
            primal = ot_primal_lp(inst, prob.radius)
            tolerance = OT_TOLERANCE * (1.0 + abs(solution.value))
        else:
            primal = otreg_primal_convex(
                inst, prob.divergence, prob.radius, solver_cfg
            ).value
            tolerance = OTREG_TOLERANCE * (1.0 + abs(solution.value))
        report = weak_duality_check(
            inst, solution.value, primal, solution.certificate, tolerance
        )
        row = report.rows[0]
        rows.append(
            {
                "instance": i,
                "primal": row["primal"],
                "dual": row["dual"],
                "gap": row["gap"],
                "certificate": row["certificate"],
                "passed": row["passed"],
            }
        )

    table = pd.DataFrame(rows)
    print(table.to_string(index=False))
    out = _output(args.out, "primal_check.csv")
    table.to_csv(out, index=False, float_format="%.17g")
    return out, bool(table["passed"].all())


def bounds(args):
    document = ConfigBuilder.load_document(args.config)
    section = document.section("bounds")
    for key in ("n", "eps"):
        if section is None or section.get(key) is None:
            raise ConfigException("BoundsSection", key, "required by the bounds command")
    fam = ConfigBuilder.create_family(document.section("family"))
    report = build_bound_report(
        fam,
        ConfigBuilder.create_cost(document.section("cost"), fam),
        section.get("n"),
        section.get("eps"),
        ConfigBuilder.create_bound_config(section),
        ConfigBuilder.create_divergence(document.section("divergence")),
        tuple(section.get("class_probs", ())),
        section.get("delta_opt", 0.0),
    )
    out = _output(args.out, "report.json")
    out.write_text(report.serialize())
    return out, True


def _experiment(run):
    def command(args):
        document = ConfigBuilder.load_document(args.config)
        cfg = ConfigBuilder.create_experiment_config(document)
        out = args.out or pathlib.Path(mkdtemp(prefix="dro_certify"))
        infos = run(cfg, out)
        return infos.get_out_dir(), infos.has_passed()

    return command


def plots(args):
    paths = emit_plots(args.csv)
    return paths[0].parent, True


def get_parser():
    parser = argparse.ArgumentParser(
        "Certified DRO values, finite-sample bounds and Monte Carlo checks"
    )
    parser.add_argument("--verbose", action="store_true", help="Log to the console")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name, function, help_text, out_help):
        command = commands.add_parser(name, help=help_text)
        command.add_argument(
            "--config", type=pathlib.Path, required=True, help="JSON run document"
        )
        command.add_argument("--out", type=pathlib.Path, help=out_help)
        command.set_defaults(function=function)
        return command

    add("dual-value", dual_value, "Solve the dual of the problem section",
        "Result JSON file")
    add("primal-check", primal_check, "Weak duality against the primal oracles",
        "Table CSV file").add_argument(
        "--instances", type=int, help="Number of random finite instances"
    )
    add("bounds", bounds, "Bound report at the (n, eps) of the bounds section",
        "Report JSON file")
    add("concentration-experiment", _experiment(run_concentration),
        "Monte Carlo check of the optimal-value tails", "Output directory")
    add("erm-experiment", _experiment(run_erm_experiment),
        "Monte Carlo check of the ERM excess-risk tails", "Output directory")

    plot = commands.add_parser("plots", help="SVG plots of an experiment run")
    plot.add_argument(
        "--csv", type=pathlib.Path, required=True, help="trials.csv of the run"
    )
    plot.set_defaults(function=plots)
    return parser


def main(argv=None):
    args = get_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO)
    try:
        dest, passed = args.function(args)
    except DroException as e:
        print(str(e), file=sys.stderr)
        return 1
    print("Script execution results are in : {}".format(dest))
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
