"""Multiplicative irrationality exponents of p-adic numbers via continued fractions.

The p-adic number ``xi = c_0 + c_1 p + c_2 p^2 + ...`` is studied through the
rationals ``x_m = c_0/p^m + ... + c_{m-1}/p`` built from reversed digit
prefixes: large partial quotients of ``x_m`` correspond to very good
multiplicative approximations ``|b xi - a|_p``.
"""

__version__ = "0.1.0"
