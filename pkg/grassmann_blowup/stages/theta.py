from core.chart_atlas import TowerIndex, rho_divisor, varpi
from .base import TowerStage


class ThetaStage(TowerStage):
    """
    ϑ-роздуття: для k = 1..Υ центр X_{u_k} ∩ X_(m,u_k).
    Карти, де x_(m,u_k) ≡ 1, центр не перетинає.
    """
    name = "theta"

    def steps(self) -> list:
        return list(range(1, self.run.model.upsilon + 1))

    def run_step(self, k: int) -> dict:
        model = self.run.model
        center = (varpi(model.leading(k)), rho_divisor(model.lead_pair(k)))
        affected = self.run.blow_up(TowerIndex(self.name, k), center, gated=False)
        self.run.theta_level = k
        return {"k": k, "charts": affected}
