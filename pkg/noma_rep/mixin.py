#   Copyright Peznauts <kevin@cloudnull.com>. All Rights Reserved.
#
#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.

import json

import yaml

from noma_rep import bounds
from noma_rep import channel
from noma_rep import ConfigError
from noma_rep import fbl
from noma_rep import logger
from noma_rep import meta
from noma_rep import montecarlo
from noma_rep import planner
from noma_rep import utils


MIN_TRIALS = 1000

OUTAGE_COLUMNS = [
    "D",
    "M",
    "T",
    "snr_db",
    "mc_exact",
    "mc_ci_lo",
    "mc_ci_hi",
    "mc_omega",
    "psi",
    "residual",
    "bound_total",
    "bound_valid",
    "psi_asymptotic",
]
FBL_COLUMNS = [
    "layer",
    "D",
    "M",
    "R",
    "n",
    "snr_db",
    "mc_avg_error",
    "mc_ci_lo",
    "mc_ci_hi",
    "analytic_upper",
]
MOMENT_COLUMNS = [
    "D",
    "M",
    "mean_W",
    "mean_W_se",
    "predicted_mean_W",
    "second_W",
    "second_W_se",
    "predicted_second_W",
    "mean_alpha_sq",
    "predicted_alpha_sq",
    "mean_alpha_cross",
    "predicted_alpha_cross",
    "ks_distance",
]
LINKLEVEL_COLUMNS = [
    "user",
    "D",
    "M",
    "R",
    "n",
    "snr_db",
    "linklevel_error",
    "linklevel_ci_lo",
    "linklevel_ci_hi",
    "analytic_sinr_error",
    "analytic_ci_lo",
    "analytic_ci_hi",
    "gap",
    "mean_sinr_measured",
    "mean_sinr_analytic",
]
SIC_COLUMNS = [
    "snr_db",
    "layer",
    "D",
    "K",
    "M",
    "T",
    "eps",
    "eps_ci_lo",
    "eps_ci_hi",
    "rho",
    "rho_ci_lo",
    "rho_ci_hi",
    "user_error",
    "union_bound",
]
PLAN_HEADINGS = ["LAYER", "D", "K", "M", "T", "R", "EPS", "RHO", "FLAGS"]


class Mixin:
    """Mixin class running the experiment commands."""

    def __init__(self, args):
        """Initialize the experiment mixin.

        The command table of the config file is merged over its
        `defaults` and the global command line options are resolved
        against it.

        :param args: Arguments parsed by argparse.
        :type args: Object
        """

        self.args = args
        self.log = logger.getLogger(
            name="noma_rep",
            debug_logging=getattr(args, "debug", False),
            log_file=getattr(args, "log_file", None),
        )
        document = dict()
        if getattr(args, "config", None):
            document = utils.load_yaml(args.config)

        self.config = utils.command_config(document, args.command)
        self.seed = self._setting("seed", meta.__seed_default__, int)
        self.trials = self._setting("trials", meta.__trials_default__, int)
        self.workers = self._setting("workers", 1, int)
        self.out = self._setting("out", None, str)
        if self.trials < MIN_TRIALS:
            raise ConfigError(
                "trials must be >= {}, got {}".format(MIN_TRIALS, self.trials)
            )
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")

    def _setting(self, key, default, cast):
        value = getattr(self.args, key, None)
        if value is None:
            value = self.config.get(key, default)
        if value is None:
            return None

        try:
            return cast(value)
        except (TypeError, ValueError):
            raise ConfigError(
                "Invalid value for [ {} ]: {}".format(key, value)
            )

    def _grid(self, key, cast=float, default=None):
        """Return a nonempty list from the command table."""

        value = self.config.get(key, default)
        if value is None:
            raise ConfigError("Missing grid [ {} ]".format(key))
        if not isinstance(value, list):
            value = [value]
        if not value:
            raise ConfigError("Grid [ {} ] is empty".format(key))

        try:
            return [cast(i) for i in value]
        except (TypeError, ValueError):
            raise ConfigError("Invalid grid [ {} ]: {}".format(key, value))

    def _layout(self):
        """Build the frame layout named by the command table.

        A `layout` document {L, layers: [{D, K}]} wins, then `layers` given
        either as {D, K} mappings or as (D, K) pairs, then the dyadic
        `blocks`/`n_layers` pair.
        """

        if "layout" in self.config:
            return channel.layout_from_dict(self.config["layout"])

        if "layers" in self.config:
            layers = self.config["layers"]
            if isinstance(layers, dict):
                return channel.layout_from_dict(layers)
            if isinstance(layers, list) and any(
                isinstance(i, dict) for i in layers
            ):
                document = {"layers": layers}
                if "L" in self.config:
                    document["L"] = self.config["L"]
                return channel.layout_from_dict(document)
            return channel.build_layout_custom(layers)

        try:
            blocks = int(self.config["blocks"])
            n_layers = int(self.config["n_layers"])
        except KeyError as e:
            raise ConfigError("Missing layout key [ {} ]".format(e.args[0]))
        except (TypeError, ValueError):
            raise ConfigError("Layout blocks and n_layers must be integers")

        return channel.build_layout(blocks, n_layers)

    @property
    def resolved(self):
        """Configuration actually used, hashed into the CSV metadata."""

        resolved = dict(self.config)
        resolved.update(seed=self.seed, trials=self.trials)
        resolved.pop("workers", None)
        resolved.pop("out", None)
        return resolved

    def _writer(self, columns):
        return utils.CsvWriter(
            path=self.out,
            header=columns,
            seed=self.seed,
            trials=self.trials,
            config=self.resolved,
        )

    def _omega_enabled(self):
        return bool(self.config.get("omega", True))

    def run_outage_sweep(self):
        """Simulate and bound the outage over a D x M x T x snr grid.

        :returns: Integer
        """

        copies = self._grid("copies", int)
        interferers = self._grid("interferers", int)
        thresholds = self._grid("thresholds")
        snr_db = self._grid("snr_db")
        with self._writer(OUTAGE_COLUMNS) as writer:
            for d in copies:
                for m in interferers:
                    for db in snr_db:
                        snr = utils.db_to_linear(db)
                        exact = montecarlo.sample_sinr_exact(
                            d, m, snr, self.trials, self.seed, self.workers
                        )
                        omega = None
                        if m and self._omega_enabled():
                            omega = montecarlo.sample_sinr_omega(
                                d, m, snr, self.trials, self.seed, self.workers
                            )
                        for t in thresholds:
                            writer.writerow(
                                self._outage_row(d, m, t, db, exact, omega)
                            )
                        self.log.info(
                            "Grid point [ D=%s M=%s snr=%s dB ] complete",
                            d,
                            m,
                            db,
                        )

        return writer.rows

    @staticmethod
    def _outage_row(copies, interferers, threshold, snr_db, exact, omega):
        snr = exact.snr
        estimate = montecarlo.estimate_outage(exact, threshold)
        row = {
            "D": copies,
            "M": interferers,
            "T": threshold,
            "snr_db": snr_db,
            "mc_exact": estimate.p_hat,
            "mc_ci_lo": estimate.ci95[0],
            "mc_ci_hi": estimate.ci95[1],
        }
        if omega is not None:
            row["mc_omega"] = montecarlo.estimate_outage(
                omega, threshold
            ).p_hat

        if interferers == 0:
            row["bound_total"] = bounds.outage_bound_m0(
                copies, threshold, snr
            )
            row["bound_valid"] = threshold / (copies * snr) <= (
                1.0 / bounds.correction_c(copies)
            )
            return row

        result = bounds.outage_bound(copies, interferers, threshold, snr)
        row.update(
            psi=result.psi,
            residual=result.residual,
            bound_total=result.total,
            bound_valid=result.valid,
            psi_asymptotic=result.floor,
        )
        return row

    def _fbl_points(self):
        """Return (layer, D, M) triples from a layout or explicit grids."""

        if any(i in self.config for i in ("layout", "layers", "blocks")):
            layout = self._layout()
            return [(i.index, i.copies, i.interferers) for i in layout.layers]

        return [
            (None, d, m)
            for d in self._grid("copies", int)
            for m in self._grid("interferers", int)
        ]

    def run_fbl_sweep(self):
        """Average error versus rate and codeword length.

        One SINR sample set per (D, M, snr) serves every rate and length.

        :returns: Integer
        """

        rates = self._grid("rates")
        lengths = self._grid("n", int)
        snr_db = self._grid("snr_db")
        mode = self.config.get("dispersion_mode", fbl.EXACT_V)
        use_mc = bool(self.config.get("mc", True))
        with self._writer(FBL_COLUMNS) as writer:
            for layer, d, m in self._fbl_points():
                for db in snr_db:
                    snr = utils.db_to_linear(db)
                    samples = None
                    if use_mc:
                        samples = montecarlo.sample_sinr_exact(
                            d, m, snr, self.trials, self.seed, self.workers
                        )
                    for n in lengths:
                        for rate in rates:
                            row = {
                                "layer": layer,
                                "D": d,
                                "M": m,
                                "R": rate,
                                "n": n,
                                "snr_db": db,
                                "analytic_upper": fbl.avg_error_upper(
                                    d, m, rate, n, snr
                                ),
                            }
                            if samples is not None:
                                estimate = fbl.avg_error_mc(
                                    samples, rate, n, mode
                                )
                                row.update(
                                    mc_avg_error=estimate.mean,
                                    mc_ci_lo=estimate.ci95[0],
                                    mc_ci_hi=estimate.ci95[1],
                                )
                            writer.writerow(row)
                    self.log.info(
                        "Grid point [ D=%s M=%s snr=%s dB ] complete",
                        d,
                        m,
                        db,
                    )

        return writer.rows

    def run_moment_check(self):
        """Compare the interference sum W with its chi-squared fit.

        :returns: Integer
        """

        pairs = self.config.get("pairs")
        if not pairs:
            raise ConfigError("Missing grid [ pairs ]")

        with self._writer(MOMENT_COLUMNS) as writer:
            for pair in pairs:
                try:
                    d, m = (int(i) for i in pair)
                except (TypeError, ValueError):
                    raise ConfigError("Invalid (D, M) pair {}".format(pair))

                diag = montecarlo.moment_diagnostics(
                    d, m, self.trials, self.seed, self.workers
                )
                writer.writerow(
                    {
                        "D": d,
                        "M": m,
                        "mean_W": diag.mean_w,
                        "mean_W_se": diag.mean_w_se,
                        "predicted_mean_W": diag.predicted_mean_w,
                        "second_W": diag.second_w,
                        "second_W_se": diag.second_w_se,
                        "predicted_second_W": diag.predicted_second_w,
                        "mean_alpha_sq": diag.mean_alpha_sq,
                        "predicted_alpha_sq": diag.predicted_alpha_sq,
                        "mean_alpha_cross": diag.mean_alpha_cross,
                        "predicted_alpha_cross": diag.predicted_alpha_cross,
                        "ks_distance": diag.ks_distance,
                    }
                )

        return writer.rows

    def build_plan(self):
        """Return the LayerPlan described by the command table."""

        config = self.config
        try:
            n_layers = int(config["n_layers"])
            snr = utils.db_to_linear(config["snr_db"])
        except KeyError as e:
            raise ConfigError("Missing plan key [ {} ]".format(e.args[0]))

        return planner.plan_frame(
            n_layers=n_layers,
            snr=snr,
            threshold=config.get("threshold"),
            eps_target=config.get("eps_target"),
            mode=config.get("mode", planner.MODE_DYADIC),
            blocks=config.get("blocks"),
            target=config.get("target", planner.TARGET_EQUAL_EPS),
            n=config.get("n"),
            debug=getattr(self.args, "debug", False),
        )

    def run_plan(self):
        """Plan a frame and emit it as JSON or YAML.

        :returns: Object
        """

        plan = self.build_plan()
        document = planner.plan_to_dict(plan)
        fmt = getattr(self.args, "format", None) or self.config.get(
            "format", "json"
        )
        if fmt not in ("json", "yaml"):
            raise ConfigError("Unknown plan format [ {} ]".format(fmt))

        if self.out:
            if fmt == "yaml":
                utils.dump_yaml(file_path=self.out, data=document)
            else:
                with open(self.out, "w") as f:
                    json.dump(document, f, indent=2, sort_keys=True)
                    f.write("\n")
            self.log.info("Plan written to [ %s ]", self.out)
            utils.print_tabulated_data(
                data=self.plan_table(plan), headers=PLAN_HEADINGS
            )
        elif fmt == "yaml":
            print(yaml.safe_dump(document, default_flow_style=False), end="")
        else:
            print(json.dumps(document, indent=2, sort_keys=True))

        return plan

    @staticmethod
    def plan_table(plan):
        """Return the rows of the plan summary table."""

        def _fmt(value):
            return "-" if value is None else "{:.6g}".format(value)

        return [
            [
                i.layer,
                i.copies,
                i.users,
                i.interferers,
                _fmt(i.threshold),
                _fmt(i.rate),
                _fmt(i.epsilon),
                _fmt(i.rho),
                ",".join(i.violations) or "ok",
            ]
            for i in plan.layers
        ]

    def run_linklevel(self):
        """Symbol-level interleaved QPSK simulation of one user.

        :returns: Integer
        """

        layout = self._layout()
        user = int(self.config.get("user", 0))
        rates = self._grid("rates")
        lengths = self._grid("n", int)
        snr_db = self._grid("snr_db")
        genie = bool(self.config.get("genie", True))
        measure_noise = bool(self.config.get("measure_noise", False))
        with self._writer(LINKLEVEL_COLUMNS) as writer:
            for db in snr_db:
                for n in lengths:
                    for rate in rates:
                        result = montecarlo.simulate_linklevel(
                            layout,
                            user,
                            rate,
                            n,
                            utils.db_to_linear(db),
                            self.trials,
                            self.seed,
                            workers=self.workers,
                            genie=genie,
                            measure_noise=measure_noise,
                        )
                        writer.writerow(
                            {
                                "user": user,
                                "D": result.copies,
                                "M": result.interferers,
                                "R": rate,
                                "n": n,
                                "snr_db": db,
                                "linklevel_error": result.measured.mean,
                                "linklevel_ci_lo": result.measured.ci95[0],
                                "linklevel_ci_hi": result.measured.ci95[1],
                                "analytic_sinr_error": result.analytic.mean,
                                "analytic_ci_lo": result.analytic.ci95[0],
                                "analytic_ci_hi": result.analytic.ci95[1],
                                "gap": result.gap,
                                "mean_sinr_measured": (
                                    result.mean_sinr_measured
                                ),
                                "mean_sinr_analytic": (
                                    result.mean_sinr_analytic
                                ),
                            }
                        )
                        self.log.info(
                            "Link level [ R=%s n=%s snr=%s dB ] complete",
                            rate,
                            n,
                            db,
                        )

        return writer.rows

    def _sic_thresholds(self, layout, snr):
        thresholds = self.config.get("thresholds")
        if thresholds is not None:
            if not isinstance(thresholds, list):
                thresholds = [thresholds] * layout.n_layers
            return [float(i) for i in thresholds]

        eps_target = self.config.get("eps_target")
        if eps_target is None:
            raise ConfigError("sic_sim needs [ thresholds ] or [ eps_target ]")

        return [
            planner.solve_threshold(
                i.copies, i.interferers, snr, float(eps_target)
            )
            for i in layout.layers
        ]

    def run_sic_sim(self):
        """Simulate SIC decoding with error propagation over whole frames.

        :returns: Integer
        """

        layout = self._layout()
        snr_db = self._grid("snr_db")
        decision = self.config.get("decision", montecarlo.DECISION_OUTAGE)
        n = self.config.get("n")
        with self._writer(SIC_COLUMNS) as writer:
            for db in snr_db:
                snr = utils.db_to_linear(db)
                thresholds = self._sic_thresholds(layout, snr)
                results = montecarlo.simulate_sic_frame(
                    layout,
                    thresholds,
                    snr,
                    self.trials,
                    self.seed,
                    workers=self.workers,
                    decision=decision,
                    n=n,
                )
                for spec, result, t in zip(layout.layers, results, thresholds):
                    writer.writerow(
                        {
                            "snr_db": db,
                            "layer": spec.index,
                            "D": spec.copies,
                            "K": spec.users,
                            "M": spec.interferers,
                            "T": t,
                            "eps": result.epsilon.p_hat,
                            "eps_ci_lo": result.epsilon.ci95[0],
                            "eps_ci_hi": result.epsilon.ci95[1],
                            "rho": result.rho.p_hat,
                            "rho_ci_lo": result.rho.ci95[0],
                            "rho_ci_hi": result.rho.ci95[1],
                            "user_error": result.user_error.p_hat,
                            "union_bound": result.union_bound,
                        }
                    )
                self.log.info("SIC frame [ snr=%s dB ] complete", db)

        return writer.rows

    def run(self):
        """Dispatch to the method of the selected command."""

        commands = {
            "outage-sweep": self.run_outage_sweep,
            "fbl-sweep": self.run_fbl_sweep,
            "moment-check": self.run_moment_check,
            "plan": self.run_plan,
            "linklevel": self.run_linklevel,
            "sic-sim": self.run_sic_sim,
        }
        return commands[self.args.command]()
