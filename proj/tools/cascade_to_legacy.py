#!/usr/bin/env python3
# Copyright 2026 The FisherLens Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rewrite a stump-based HAAR cascade from the opencv-cascade-classifier
schema into the legacy opencv-haar-classifier schema (size/trees/stage_threshold)."""

import sys
import xml.etree.ElementTree as ET


def main(src, dst, name):
    root = ET.parse(src).getroot()
    casc = root.find("cascade")
    w, h = casc.findtext("width").strip(), casc.findtext("height").strip()
    feats = [f for f in casc.find("features")]
    out = ['<?xml version="1.0"?>', "<opencv_storage>",
           '<%s type_id="opencv-haar-classifier">' % name,
           "  <size>%s %s</size>" % (w, h), "  <stages>"]
    for si, st in enumerate(casc.find("stages")):
        out.append("    <_>")
        out.append("      <!-- stage %d -->" % si)
        out.append("      <trees>")
        for wc in st.find("weakClassifiers"):
            nodes = wc.findtext("internalNodes").split()
            leaves = wc.findtext("leafValues").split()
            if len(nodes) != 4 or len(leaves) != 2:
                raise SystemExit("not a stump cascade")
            feat = feats[int(nodes[2])]
            out.append("        <_>")
            out.append("          <_>")
            out.append("            <feature>")
            out.append("              <rects>")
            for r in feat.find("rects"):
                out.append("                <_>%s</_>" % " ".join(r.text.split()))
            out.append("              </rects>")
            out.append("              <tilted>%s</tilted></feature>"
                       % (feat.findtext("tilted") or "0").strip())
            out.append("            <threshold>%s</threshold>" % nodes[3])
            out.append("            <left_val>%s</left_val>" % leaves[0])
            out.append("            <right_val>%s</right_val></_></_>" % leaves[1])
        out.append("      </trees>")
        out.append("      <stage_threshold>%s</stage_threshold>"
                   % st.findtext("stageThreshold").strip())
        out.append("      <parent>%d</parent>" % (si - 1))
        out.append("      <next>-1</next></_>")
    out.append("  </stages></%s>" % name)
    out.append("</opencv_storage>")
    with open(dst, "w") as f:
        f.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2],
         sys.argv[3] if len(sys.argv) > 3 else "haarcascade_frontalface_default")
