"""
Small tanh multilayer perceptron score model.

Partials in t and x come from a forward tangent pass carried alongside the
activations. Parameter gradients come from reverse accumulation through both
the value track and the t-tangent track, since the score matching losses
depend on d_t s as well as on s.
"""

import numpy as np

from .base import ScoreModelError
from .features import as_batch


class MlpScoreModel:
    """
    MLP s(x, t) with tanh hidden layers and a linear scalar output.

    Args:
        dim: dimension of x (the network input is (x, t))
        hidden: hidden layer widths
        params: flat parameter vector; drawn from `rng` when omitted
        rng: numpy Generator used for initialization
    """

    kind = "mlp"

    def __init__(self, dim, hidden=(32, 32), params=None, rng=None):
        self.dim = int(dim)
        self.hidden = tuple(int(h) for h in hidden)
        widths = (self.dim + 1,) + self.hidden + (1,)
        self.shapes = [(widths[i + 1], widths[i]) for i in range(len(widths) - 1)]
        size = sum(out * (inp + 1) for out, inp in self.shapes)

        if params is None:
            if rng is None:
                raise ScoreModelError("An MLP needs either parameters or an rng")
            params = self._initial_params(rng)
        params = np.array(params, dtype=np.float64, copy=True)
        if params.shape != (size,):
            raise ScoreModelError(f"Expected {size} MLP parameters, got shape {params.shape}")
        params.setflags(write=False)
        self._params = params
        self.layers = self._unpack(params)

    def _initial_params(self, rng):
        chunks = []
        for out, inp in self.shapes:
            chunks.append(rng.standard_normal(out * inp) / np.sqrt(inp))
            chunks.append(np.zeros(out))
        return np.concatenate(chunks)

    def _unpack(self, params):
        layers, offset = [], 0
        for out, inp in self.shapes:
            weight = params[offset:offset + out * inp].reshape(out, inp)
            offset += out * inp
            bias = params[offset:offset + out]
            offset += out
            layers.append((weight, bias))
        return layers

    @property
    def params(self):
        return self._params.copy()

    def with_params(self, params):
        return MlpScoreModel(self.dim, self.hidden, params=params)

    def _forward(self, x, t, directions):
        """
        Activations and tangents along `directions` (D, dim + 1).

        Returns:
            Tuple (s (B,), ds (B, D), activations, tangents, pre-activation tangents)
        """
        x, t = as_batch(x, t, self.dim)
        h = np.column_stack([x, t])
        dh = np.broadcast_to(directions, (len(h),) + directions.shape)
        hs, dhs, das = [h], [dh], []
        for weight, bias in self.layers[:-1]:
            da = dh @ weight.T
            h = np.tanh(h @ weight.T + bias)
            dh = (1.0 - h ** 2)[:, None, :] * da
            hs.append(h)
            dhs.append(dh)
            das.append(da)
        weight, bias = self.layers[-1]
        s = (h @ weight.T + bias)[:, 0]
        ds = (dh @ weight.T)[:, :, 0]
        return s, ds, hs, dhs, das

    def _t_direction(self):
        direction = np.zeros((1, self.dim + 1))
        direction[0, -1] = 1.0
        return direction

    def eval(self, x, t):
        return self._forward(x, t, self._t_direction())[0]

    def time_partial(self, x, t):
        return self._forward(x, t, self._t_direction())[1][:, 0]

    def grad_x(self, x, t):
        directions = np.eye(self.dim + 1)[:self.dim]
        return self._forward(x, t, directions)[1]

    def jet(self, x, t):
        s, ds, _, _, _ = self._forward(x, t, self._t_direction())
        return s, ds[:, 0]

    def vjp(self, x, t, cot_value, cot_dt=None):
        """Gradient of sum(cot_value * s + cot_dt * ds/dt) in the parameters."""
        _, _, hs, dhs, das = self._forward(x, t, self._t_direction())
        cv = np.asarray(cot_value, dtype=np.float64)
        ct = np.zeros_like(cv) if cot_dt is None else np.asarray(cot_dt, dtype=np.float64)

        weight, _ = self.layers[-1]
        h, dh = hs[-1], dhs[-1][:, 0, :]
        grads = [(cv @ h + ct @ dh)[None, :], np.array([cv.sum()])]
        g_h = cv[:, None] * weight[0]
        gd_h = ct[:, None] * weight[0]

        for i in range(len(self.layers) - 2, -1, -1):
            weight, _ = self.layers[i]
            h, da = hs[i + 1], das[i][:, 0, :]
            slope = 1.0 - h ** 2
            g_da = gd_h * slope
            # the tangent (1 - h^2) * da also depends on h
            g_a = (g_h - 2.0 * gd_h * h * da) * slope
            h_prev, dh_prev = hs[i], dhs[i][:, 0, :]
            grads = [g_a.T @ h_prev + g_da.T @ dh_prev, g_a.sum(axis=0)] + grads
            g_h = g_a @ weight
            gd_h = g_da @ weight

        return np.concatenate([g.ravel() for g in grads])

    def to_dict(self):
        return {"kind": self.kind, "dim": self.dim, "hidden": list(self.hidden),
                "params": self._params.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["dim"], data["hidden"], params=data["params"])
