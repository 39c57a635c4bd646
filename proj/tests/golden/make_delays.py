"""Regenerates linear8_delays.json with 50-digit arithmetic.

8 mics, 0.38 m aperture along x, centered at the origin, reference mic 0.
Steering point 100 m from the centroid at each azimuth; c = 343, sr = 16000.
"""
import json

from mpmath import mp, mpf, cos, sin, pi, sqrt, floor

mp.dps = 50
C, SR, R = mpf(343), mpf(16000), mpf(100)
mics = [mpf("-0.19") + mpf("0.38") * i / 7 for i in range(8)]


def shifts(deg):
    a = mpf(deg) * pi / 180
    px, py = R * cos(a), R * sin(a)
    d = [sqrt((px - x) ** 2 + py ** 2) for x in mics]
    return [int(floor((d[0] - di) * SR / C)) for di in d]


angles = list(range(0, 360, 5)) + [72.5, 77.5, 102.5, 107.5]
out = {"angles": angles, "shifts": [shifts(a) for a in angles]}
with open("linear8_delays.json", "w") as f:
    json.dump(out, f)
    f.write("\n")
