"""
Routing around a link that is about to break
============================================

Node 1 relays traffic from node 0 to the ground station, but it is flying
away.  Plain OLSR keeps using it until the link is gone; the mobility-aware
variant sees the break coming within its 3.75 s horizon and switches to the
longer path through nodes 2 and 3.
"""

import numpy as np

from marsim import ScenarioConfig
from marsim.sim import Network

speed = 13.9
trace = {
    0: (np.array([0.0, 100.0]), np.array([[250, 330, 0], [250, 330, 0]], float)),
    1: (np.array([0.0, 4.0, 20.0]), np.array([[250, 165, 0], [250, 165, 0],
                                               [250 + 16 * speed, 165, 0]], float)),
    2: (np.array([0.0, 100.0]), np.array([[110, 250, 0], [110, 250, 0]], float)),
    3: (np.array([0.0, 100.0]), np.array([[110, 90, 0], [110, 90, 0]], float)),
}

nets = {}
for protocol in ("OLSR", "MA-OLSR"):
    cfg = ScenarioConfig(protocol=protocol, duration=16.0, warmup=3.0)
    nets[protocol] = Network(cfg, seed=1, trace=trace, source=0)
    nets[protocol].start()

print(" t [s]   OLSR hop   MA-OLSR hop")
for t in np.arange(4.0, 16.5, 1.0):
    hops = []
    for net in nets.values():
        net.kernel.run_until(t)
        hops.append(net.protocols[0].next_hop(net.sink))
    print(f"{t:6.1f}   {str(hops[0]):>8}   {str(hops[1]):>11}")

for protocol, net in nets.items():
    s = net.stats
    print(f"{protocol:8} delivered {s.delivered}/{s.sent}, lost on dead links {s.channel_losses}")
