"""Equation solving in class-2 nilpotent groups and their finite extensions.

The pipeline: exact collection arithmetic over a Mal'cev presentation
(`malcev`), an equation DSL and evaluator (`equations`), symbolic collection
into an integer system of linear/quadratic equations and congruences
(`reduction`), a layered integer solver with three-valued verdicts
(`zsolver`), reduction of equations in finite extensions to twisted
equations (`extension`), plus a brute-force oracle, fuzz harness and CLI.
"""

__version__ = "0.1.0"
