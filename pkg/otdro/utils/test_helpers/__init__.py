from .problem_helper import ProblemHelper
