"""Induced multiphoton transition rates.

The longitudinal coupling dresses the transverse one, so the qubit can
exchange n photons at once with the symmetric supermode A+. With resonators
at omega/2pi = 2500 MHz, G = 0.06 omega, and mixing angle pi/4, the
two-photon rate lands near 18 MHz and the three-photon rate near 1.1 MHz --
the former well above typical decoherence rates (qubit dephasing ~1 MHz,
resonator linewidth ~0.25 MHz), which is what makes the blockade usable.
"""

from _common import paper_params

from blockade_sim import derive_supermodes, multiphoton_coefficient

p = paper_params(g=0.0)
sp = derive_supermodes(p)

print(f"Lamb-Dicke parameter lambda = {sp.lamb_dicke:.4f}")
print(f"transverse coupling  Gx     = {sp.Gx:.1f}")
print(f"quadratic coupling   Theta  = {sp.Theta:.2f}\n")

print("n-photon transition rates |Gx B2(0, n)|, quoted as Theta_n/2pi in MHz")
print(f"{'n':>3} {'rate (MHz)':>12}")
for n in range(2, 7):
    rate = abs(sp.Gx * multiphoton_coefficient("B2", 0, n, sp.lamb_dicke))
    print(f"{n:>3} {rate:>12.4f}")

print("\nhigher-order p-photon-assisted coefficients fall off just as fast:")
for m in range(0, 4):
    value = multiphoton_coefficient("B2", m, 2, sp.lamb_dicke)
    print(f"  B2(m={m}, n=2) = {value:+.3e}")
