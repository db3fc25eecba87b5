from src.clustering.base import ClusteringPolicy
from src.clustering.cactis import CactisPolicy, cactis_blocks
from src.clustering.ck import CkCostTable, CkPolicy, ck_cluster_object, ck_cost_table, split_page
from src.clustering.orion import OrionPolicy
from src.config import PolicyName, SimConfig

POLICIES: dict[PolicyName, type[ClusteringPolicy]] = {
    PolicyName.CACTIS: CactisPolicy,
    PolicyName.ORION: OrionPolicy,
    PolicyName.CK: CkPolicy,
}


def make_policy(config: SimConfig) -> ClusteringPolicy:
    return POLICIES[config.policy](config)


__all__ = [
    "POLICIES",
    "CactisPolicy",
    "CkCostTable",
    "CkPolicy",
    "ClusteringPolicy",
    "OrionPolicy",
    "cactis_blocks",
    "ck_cluster_object",
    "ck_cost_table",
    "make_policy",
    "split_page",
]
