from .base import (LinkMap, MobilityAwareRouting, RoutingProtocol, find_best_neighbor, first_hop,
                   hop_distances, link, prune_links)
from .batman import (Batman, BatMobile, OriginatorWindow, batman_select_next_hop,
                     path_score_update)
from .olsr import MAOLSR, OLSR
from .packets import (DataPacket, Hello, MobilityUpdatePacket, OriginatorMessage, PacketError,
                      PathScorePacket, TopologyControl, deserialize_packet, serialize_packet)
