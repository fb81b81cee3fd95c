"""tileforge: domino problems, p-adic Sudoku puzzles, functional-equation
systems and translational tiling systems, composed as a compiler pipeline.

Subpackages are organized along the reduction chain:

* ``padic``         exact valuation/digit arithmetic, affine forms, CRT
* ``domino``        domino sets, Wang tile-sets, bounded rectangle solving
* ``sudoku``        boards, lines, rule oracles, windows, initial conditions
* ``padic_sudoku``  the width-p^2 digit rule, generation and recovery
* ``decorated``     the two-prime decorated rule, encode/extract
* ``feq``           functional equations with subsets, expressibility library
* ``tiling``        tiling-equation systems over Z^2 x H, periodic solving
* ``cli``           the ``tileforge`` pipeline driver
"""

__version__ = "0.1.0"
