#!/usr/bin/env python3
"""Exports the tiny ONNX classifiers used by the classifier tests.

Writes tiny6.onnx (6-way head), tiny5.onnx (5-way head, must be rejected)
and tiny6_expected.json with reference probabilities computed in torch for
two probe frames. Requires torch and onnx.

    python3 scripts/export_fixture_models.py tests/fixtures/models
"""
import json
import sys
from pathlib import Path

import torch
import torch.nn as nn


class Head(nn.Module):
    def __init__(self, classes):
        super().__init__()
        self.conv = nn.Conv2d(3, 4, 3, padding=1)
        self.pool = nn.AdaptiveAvgPool2d(1)
        self.fc = nn.Linear(4, classes)

    def forward(self, x):
        return self.fc(torch.flatten(self.pool(torch.relu(self.conv(x))), 1))


def probe_frames():
    zero = [[0] * 32 for _ in range(32)]
    ramp = [[(4 * (x + y)) % 256 for x in range(32)] for y in range(32)]
    return {"zero": zero, "ramp": ramp}


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    models = {}
    for classes in (6, 5):
        torch.manual_seed(7)
        model = Head(classes).eval()
        torch.onnx.export(
            model, torch.zeros(1, 3, 32, 32), str(out / f"tiny{classes}.onnx"),
            opset_version=13, input_names=["input"], output_names=["logits"],
            dynamic_axes={"input": {0: "N"}, "logits": {0: "N"}}, dynamo=False)
        models[classes] = model

    expected = {}
    for name, pixels in probe_frames().items():
        x = torch.tensor(pixels, dtype=torch.float64) / 255.0
        x = x.unsqueeze(0).unsqueeze(0).repeat(1, 3, 1, 1)
        with torch.no_grad():
            logits = models[6].double()(x)
        probs = torch.softmax(logits, dim=1)[0].tolist()
        expected[name] = {"pixels": pixels, "probs": probs}
    (out / "tiny6_expected.json").write_text(json.dumps(expected, indent=1) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/models")
