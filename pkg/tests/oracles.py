"""Reference values computed independently and frozen here.

Survival values ``r_d`` come from iterating the extinction generating
function ``s -> a3 + (a0 + a1) s + a2 s^2`` from 0 in 50-digit mpmath
arithmetic, a different route from the library's binary64 survival
recurrence.  ``r_d = 1 - G^{(d)}(0)``.
"""

R_PRODUCT_08 = {1: 0.96, 12: 0.937500888973385, 25: 0.937500000005966, 200: 0.9375}
R_NFOLD_015_3 = {12: 0.674366237855325, 20: 0.666556853147545, 25: 0.665753925469909, 60: 0.665451929835596}
R_NFOLD_021_3 = {20: 0.158182864539931, 200: 0.00410364830649212}
R_PAIR_02 = {12: 0.780826226157831}
R_PAIR_028 = {12: 0.377596756160608}

# threshold(n) = 1 - 2**(-1/n), 50-digit mpmath
THRESHOLD = {1: 0.5, 2: 0.292893218813452, 3: 0.206299474015900, 68: 0.0101415648642295, 69: 0.00999532269332286}

# closed-form emptiness 1 - (1 - 2 f_n(p)) / (1 - 2p)^n at p = 0.15, n = 3
NFOLD_EMPTINESS_015_3 = 0.334548104956268

# 99% Wilson intervals from statsmodels proportion_confint(method="wilson")
WILSON_99 = {
    (50, 100): (0.3752796250448398, 0.6247203749551602),
    (0, 10): (0.0, 0.3988540933049082),
    (10, 10): (0.6011459066950917, 1.0),
    (93705, 100000): (0.9350425382119547, 0.9389994700045508),
    (3, 1000): (0.0007581012310614674, 0.011793516682924922),
}
