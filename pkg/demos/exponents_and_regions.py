"""
Exponents and admissible regions
================================

Exact rational bookkeeping for the coupled structurally damped system:
derived constants, the critical exponent, region verdicts and decay rates.
"""

from fractions import Fraction

from sigmadamp.model import (
    ModelParams,
    check_region,
    critical_exponent,
    decay_prediction,
    derive_constants,
    lifespan_exponent,
    loss_of_decay,
    phase_csv,
    phase_diagram,
)

# sigma = 3/2, delta = 1/8 puts us below the half-damping line
params = ModelParams("3/2", "1/8", 3, m="5/4")
dc = derive_constants(params)
print("k- =", dc.k_minus, " k+ =", dc.k_plus, " m0 =", dc.m0, " regime:", dc.regime.value)

# everything stays a Fraction, so thresholds are exact
print("critical exponent (n=3):", critical_exponent(params))
print("critical exponent (n=1):", critical_exponent(params.with_(n=1)))

# the sub-critical existence region needs q above 103/26 when p = 2
for q in (Fraction(3), Fraction(103, 26), Fraction(4)):
    v = check_region(params.with_(p=2, q=q), "T1A")
    print(f"T1A at p=2, q={q}: admissible={v.admissible}", "" if v.admissible else f"fails {v.first_violated}")

# loss of decay paid below the critical exponent
print("loss at p=2:", loss_of_decay(params, 2), "=", float(loss_of_decay(params, 2)))

# linear rates: data exponents for the displacement and velocity
for j, a in ((0, 0), (0, 1), (1, 0)):
    d = decay_prediction(params, j, a)
    print(f"j={j} a={a}: (1+t)^{d.exponent_data0} from w0, (1+t)^{d.exponent_data1} from w1")

# a small phase diagram, ready for any plotting tool
rows = phase_diagram(ModelParams(2, 1, 1), [2, 3, 4], [2, 3, 4], ["T1B", "Blowup"])
print(phase_csv(rows).replace("\r\n", "\n"))

# in the blow-up region the lifespan scales like eps^exponent
print("lifespan exponent, p=q=2:", lifespan_exponent(ModelParams(2, 1, 1, p=2, q=2)))
