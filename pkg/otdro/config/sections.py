from .json_data import JsonData

DIVERGENCES = {"kl", "alpha"}
PENALTIES = {"hard_ball", "power_law", "power_plus_linear", "exponential"}
NORMS = {"l2", "linf"}
FAMILIES = {"clamped_linear_margin", "saturated_logistic"}
STRATEGIES = {"grid_1d", "multi_start_ascent"}
PRIMAL_METHODS = {"slsqp", "projected_subgradient"}
SCENARIOS = {"ot_values", "ot_erm", "otreg_values", "otreg_erm"}
ERM_SEARCHES = {"grid", "random_search", "subgradient_descent"}
NU_RULES = {"sample_range", "shifted"}


class DivergenceSection(JsonData):
    def _get_base_object(self):
        return DivergenceSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._required += ["family"]
        self._optional += ["alpha"]

    def set_family(self, family):
        return self._set_value("family", family)

    def set_alpha(self, alpha):
        return self._set_value("alpha", alpha)

    def _validate_all_keys(self):
        self._check_choice("family", DIVERGENCES)
        self._check_number("alpha", low=1.0)
        if self._get_key("family") == "alpha" and "alpha" not in self:
            self._fail("alpha", "required by the alpha family")


class PenaltySection(JsonData):
    def _get_base_object(self):
        return PenaltySection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._required += ["family"]
        self._optional += ["alpha", "q", "eta"]

    def set_family(self, family):
        return self._set_value("family", family)

    def set_alpha(self, alpha):
        return self._set_value("alpha", alpha)

    def set_q(self, q):
        return self._set_value("q", q)

    def set_eta(self, eta):
        return self._set_value("eta", eta)

    def _validate_all_keys(self):
        self._check_choice("family", PENALTIES)
        for key in self._optional:
            self._check_number(key, low=0.0)


class CostSection(JsonData):
    def _get_base_object(self):
        return CostSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        if isinstance(self._values.get("penalty"), dict):
            self._values["penalty"] = PenaltySection(self._values["penalty"])
        self._required += ["penalty"]
        self._optional += ["delta", "norm", "M"]

    def set_penalty(self, penalty: PenaltySection):
        return self._set_value("penalty", penalty)

    def set_delta(self, delta):
        return self._set_value("delta", delta)

    def set_norm(self, norm):
        return self._set_value("norm", norm)

    def set_M(self, M):
        return self._set_value("M", M)

    def _validate_all_keys(self):
        self._check_number("delta", low=0.0, strict=False)
        self._check_number("M", low=0.0, strict=False)
        self._check_choice("norm", NORMS)
        if not isinstance(self._get_key("penalty"), PenaltySection):
            self._fail("penalty", "expected a penalty section")
        self._get_key("penalty").validate()


class FamilySection(JsonData):
    def _get_base_object(self):
        return FamilySection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._required += ["kind", "dim"]
        self._optional += ["beta", "box", "norm", "lipschitz_x"]

    def set_kind(self, kind):
        return self._set_value("kind", kind)

    def set_dim(self, dim):
        return self._set_value("dim", dim)

    def set_beta(self, beta):
        return self._set_value("beta", beta)

    def set_box(self, box):
        return self._set_value("box", box)

    def set_lipschitz_x(self, lipschitz_x):
        return self._set_value("lipschitz_x", lipschitz_x)

    def _validate_all_keys(self):
        self._check_choice("kind", FAMILIES)
        self._check_number("dim", low=0, integer=True)
        for key in ("beta", "box", "lipschitz_x"):
            self._check_number(key, low=0.0)
        self._check_choice("norm", NORMS)
        if self._get_key("kind") == "saturated_logistic" and "lipschitz_x" not in self:
            self._fail("lipschitz_x", "required by the saturated logistic loss")


class InnerSection(JsonData):
    def _get_base_object(self):
        return InnerSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._optional += [
            "strategy", "restarts", "steps", "step_size", "grid_points",
            "tolerance", "seed",
        ]

    def set_strategy(self, strategy):
        return self._set_value("strategy", strategy)

    def _validate_all_keys(self):
        self._check_choice("strategy", STRATEGIES)
        for key in ("restarts", "steps", "grid_points"):
            self._check_number(key, low=0, integer=True)
        self._check_number("seed", low=0, strict=False, integer=True)
        self._check_number("step_size", low=0.0)
        self._check_number("tolerance", low=0.0)


class BoundsSection(JsonData):
    def _get_base_object(self):
        return BoundsSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._optional += [
            "split_gamma", "split_three", "lambda_n_scale", "lambda_n_exponent",
            "p0", "quadrature_points", "quadrature_order", "n", "eps",
            "class_probs", "delta_opt",
        ]

    def set_n(self, n):
        return self._set_value("n", n)

    def set_eps(self, eps):
        return self._set_value("eps", eps)

    def _validate_all_keys(self):
        self._check_number("split_gamma", low=0.0, high=1.0)
        self._check_number("lambda_n_scale", low=0.0)
        self._check_number("lambda_n_exponent")
        self._check_number("p0", low=0.0, high=1.0)
        self._check_number("quadrature_points", low=0, integer=True)
        self._check_number("quadrature_order", low=0, integer=True)
        self._check_number("n", low=0, integer=True)
        self._check_number("eps", low=0.0, strict=False)
        self._check_number("delta_opt", low=0.0, high=1.0, strict=False)
        if "split_three" in self and len(self._get_key("split_three")) != 3:
            self._fail("split_three", "expected three weights")


class PrimalSection(JsonData):
    def _get_base_object(self):
        return PrimalSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._optional += [
            "method", "max_iterations", "tolerance", "step_size",
            "points_per_axis", "instances",
        ]

    def set_method(self, method):
        return self._set_value("method", method)

    def set_instances(self, instances):
        return self._set_value("instances", instances)

    def _validate_all_keys(self):
        self._check_choice("method", PRIMAL_METHODS)
        for key in ("max_iterations", "points_per_axis", "instances"):
            self._check_number(key, low=0, integer=True)
        for key in ("tolerance", "step_size"):
            self._check_number(key, low=0.0)


class GeneratorSection(JsonData):
    def _get_base_object(self):
        return GeneratorSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._optional += ["p_plus", "centers", "component_weights", "sigma"]

    def set_p_plus(self, p_plus):
        return self._set_value("p_plus", p_plus)

    def set_centers(self, centers):
        return self._set_value("centers", centers)

    def set_sigma(self, sigma):
        return self._set_value("sigma", sigma)

    def _validate_all_keys(self):
        self._check_number("p_plus", low=0.0, high=1.0)
        self._check_number("sigma", low=0.0, strict=False)


class ExperimentSection(JsonData):
    def _get_base_object(self):
        return ExperimentSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._required += ["scenario"]
        self._optional += [
            "n_train", "n_reference", "trials", "radius", "eps_grid", "seed",
            "theta_points", "erm_search", "erm_budget", "workers", "delta_opt",
        ]

    def set_scenario(self, scenario):
        return self._set_value("scenario", scenario)

    def set_trials(self, trials):
        return self._set_value("trials", trials)

    def set_n_train(self, n_train):
        return self._set_value("n_train", n_train)

    def set_n_reference(self, n_reference):
        return self._set_value("n_reference", n_reference)

    def set_erm_search(self, erm_search):
        return self._set_value("erm_search", erm_search)

    def _validate_all_keys(self):
        self._check_choice("scenario", SCENARIOS)
        self._check_choice("erm_search", ERM_SEARCHES)
        for key in ("n_train", "n_reference", "trials", "theta_points", "erm_budget",
                    "workers"):
            self._check_number(key, low=0, integer=True)
        self._check_number("seed", low=0, strict=False, integer=True)
        self._check_number("radius", low=0.0)
        self._check_number("delta_opt", low=0.0, high=1.0, strict=False)
        if "eps_grid" in self and not self._get_key("eps_grid"):
            self._fail("eps_grid", "needs at least one deviation")


class ProblemSection(JsonData):
    def _get_base_object(self):
        return ProblemSection

    def __init__(self, init_values=None):
        super().__init__(init_values)
        self._required += ["theta", "radius"]
        self._optional += ["sample", "n", "seed", "nu_rule", "outer_tol"]

    def set_theta(self, theta):
        return self._set_value("theta", theta)

    def set_radius(self, radius):
        return self._set_value("radius", radius)

    def set_sample(self, path):
        return self._set_value("sample", str(path))

    def set_n(self, n):
        return self._set_value("n", n)

    def _validate_all_keys(self):
        self._check_number("radius", low=0.0)
        self._check_number("n", low=0, integer=True)
        self._check_number("seed", low=0, strict=False, integer=True)
        self._check_number("outer_tol", low=0.0)
        self._check_choice("nu_rule", NU_RULES)
        if "sample" not in self and "n" not in self:
            self._fail("sample", "give a sample file or a size n to draw")


SECTIONS = {
    "divergence": DivergenceSection,
    "cost": CostSection,
    "family": FamilySection,
    "inner": InnerSection,
    "bounds": BoundsSection,
    "primal": PrimalSection,
    "generator": GeneratorSection,
    "experiment": ExperimentSection,
    "problem": ProblemSection,
}


class RunDocument(JsonData):
    """The whole configuration handed to the command line"""

    def _get_base_object(self):
        return RunDocument

    def __init__(self, init_values=None):
        super().__init__()
        for key, value in (init_values or {}).items():
            section = SECTIONS.get(key)
            self._values[key] = (
                section(value) if section and isinstance(value, dict) else value
            )
        self._required += ["family", "cost"]
        self._optional += [k for k in SECTIONS if k not in self._required]

    def set_section(self, key, section: JsonData):
        return self._set_value(key, section)

    def section(self, key):
        return self._values.get(key)

    def _validate_all_keys(self):
        for key, value in self._values.items():
            if not isinstance(value, SECTIONS[key]):
                self._fail(key, "expected a {} object".format(SECTIONS[key].__name__))
            value.validate()
