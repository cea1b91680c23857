"""
How far does a 100 mW UAV radio reach?
======================================

The agents plan routes with a mean path-loss model.  This walks through the
numbers behind the maximum communication distance and what Nakagami fading
does to reception around it.
"""

import numpy as np

from marsim.channel import ChannelModel, max_distance, success_probability

# 2.4 GHz, 20 dBm transmit power, -83 dBm receiver sensitivity
for alpha in (2.0, 2.75, 3.5):
    m = ChannelModel(alpha=alpha)
    print(f"alpha={alpha:<5} reference loss {m.pl0:6.2f} dB  d_max {max_distance(m):8.1f} m")

# With alpha = 2 the range exceeds the 500 x 500 x 250 m mission area, so
# every agent hears every other one.  The default exponent is 2.75.
fading = ChannelModel.nakagami()
d_max = max_distance(fading)
for frac in np.linspace(0.25, 2.0, 8):
    p = success_probability(fading, frac * d_max)
    print(f"{frac * d_max:7.1f} m  P(receive) = {p:.3f}")
# At exactly d_max the mean power equals the sensitivity and m = 2 fading
# still delivers about 41 % of frames.
