#!/usr/bin/env python3
"""Writes the built-in network descriptors under data/networks/.

Each layer with weights becomes one entry with its parameter count and the
forward+backward cost of one sample, taken as 6 FLOPs per multiply-accumulate
(2 forward, 4 backward). Pooling, activations and normalization arithmetic are
ignored. Batch-norm layers contribute their trainable scale/shift vectors.

Usage: gen_network_descriptors.py [output_dir]
"""

import json
import math
import os
import sys

def conv(layers,name,cin,cout,kh,kw,hin,win,stride=1,pad='same',groups=1,bias=True,bn=0):
    if pad=='same': ho=math.ceil(hin/stride); wo=math.ceil(win/stride)
    else: ho=(hin-kh)//stride+1; wo=(win-kw)//stride+1
    w=kh*kw*(cin//groups)*cout
    params=w+(cout if bias else 0)+bn*cout
    macs=ho*wo*w
    layers.append(dict(name=name,macs=macs,params=params)); return ho,wo
def fc(layers,name,cin,cout):
    layers.append(dict(name=name,macs=cin*cout,params=cin*cout+cout))
def alexnet():
    L=[];h,w=conv(L,'conv1',3,96,11,11,227,227,4,'valid'); h=w=27
    conv(L,'conv2',96,256,5,5,27,27,1,'same',2); conv(L,'conv3',256,384,3,3,13,13)
    conv(L,'conv4',384,384,3,3,13,13,1,'same',2); conv(L,'conv5',384,256,3,3,13,13,1,'same',2)
    fc(L,'fc6',9216,4096); fc(L,'fc7',4096,4096); fc(L,'fc8',4096,1000); return L
def googlenet():
    L=[];conv(L,'conv1/7x7_s2',3,64,7,7,224,224,2)
    conv(L,'conv2/3x3_reduce',64,64,1,1,56,56); conv(L,'conv2/3x3',64,192,3,3,56,56)
    spec=[('3a',192,28,64,96,128,16,32,32),('3b',256,28,128,128,192,32,96,64),
          ('4a',480,14,192,96,208,16,48,64),('4b',512,14,160,112,224,24,64,64),('4c',512,14,128,128,256,24,64,64),
          ('4d',512,14,112,144,288,32,64,64),('4e',528,14,256,160,320,32,128,128),
          ('5a',832,7,256,160,320,32,128,128),('5b',832,7,384,192,384,48,128,128)]
    for n,cin,s,a,br,b,cr,c,pp in spec:
        p='inception_'+n+'/'
        conv(L,p+'1x1',cin,a,1,1,s,s); conv(L,p+'3x3_reduce',cin,br,1,1,s,s); conv(L,p+'3x3',br,b,3,3,s,s)
        conv(L,p+'5x5_reduce',cin,cr,1,1,s,s); conv(L,p+'5x5',cr,c,5,5,s,s); conv(L,p+'pool_proj',cin,pp,1,1,s,s)
    fc(L,'loss3/classifier',1024,1000); return L
def inception3():
    L=[];C=lambda n,ci,co,kh,kw,h,w,s=1,pad='same': conv(L,n,ci,co,kh,kw,h,w,s,pad,1,False,1)
    C('Conv2d_1a_3x3',3,32,3,3,299,299,2,'valid'); C('Conv2d_2a_3x3',32,32,3,3,149,149,1,'valid')
    C('Conv2d_2b_3x3',32,64,3,3,147,147); C('Conv2d_3b_1x1',64,80,1,1,73,73); C('Conv2d_4a_3x3',80,192,3,3,73,73,1,'valid')
    cin=192
    for n,pp in (('Mixed_5b',32),('Mixed_5c',64),('Mixed_5d',64)):
        s=35;C(n+'/b0_1x1',cin,64,1,1,s,s);C(n+'/b1_1x1',cin,48,1,1,s,s);C(n+'/b1_5x5',48,64,5,5,s,s)
        C(n+'/b2_1x1',cin,64,1,1,s,s);C(n+'/b2_3x3a',64,96,3,3,s,s);C(n+'/b2_3x3b',96,96,3,3,s,s);C(n+'/b3_1x1',cin,pp,1,1,s,s)
        cin=64+64+96+pp
    n='Mixed_6a';C(n+'/b0_3x3',288,384,3,3,35,35,2,'valid');C(n+'/b1_1x1',288,64,1,1,35,35);C(n+'/b1_3x3a',64,96,3,3,35,35);C(n+'/b1_3x3b',96,96,3,3,35,35,2,'valid')
    cin=768;s=17
    for n,m in (('Mixed_6b',128),('Mixed_6c',160),('Mixed_6d',160),('Mixed_6e',192)):
        C(n+'/b0_1x1',cin,192,1,1,s,s);C(n+'/b1_1x1',cin,m,1,1,s,s);C(n+'/b1_1x7',m,m,1,7,s,s);C(n+'/b1_7x1',m,192,7,1,s,s)
        C(n+'/b2_1x1',cin,m,1,1,s,s);C(n+'/b2_7x1a',m,m,7,1,s,s);C(n+'/b2_1x7a',m,m,1,7,s,s);C(n+'/b2_7x1b',m,m,7,1,s,s);C(n+'/b2_1x7b',m,192,1,7,s,s)
        C(n+'/b3_1x1',cin,192,1,1,s,s)
    C('AuxLogits/1x1',768,128,1,1,5,5);C('AuxLogits/5x5',128,768,5,5,5,5,1,'valid');fc(L,'AuxLogits/fc',768,1000)
    n='Mixed_7a';C(n+'/b0_1x1',768,192,1,1,17,17);C(n+'/b0_3x3',192,320,3,3,17,17,2,'valid')
    C(n+'/b1_1x1',768,192,1,1,17,17);C(n+'/b1_1x7',192,192,1,7,17,17);C(n+'/b1_7x1',192,192,7,1,17,17);C(n+'/b1_3x3',192,192,3,3,17,17,2,'valid')
    cin=1280;s=8
    for n in ('Mixed_7b','Mixed_7c'):
        C(n+'/b0_1x1',cin,320,1,1,s,s);C(n+'/b1_1x1',cin,384,1,1,s,s);C(n+'/b1_1x3',384,384,1,3,s,s);C(n+'/b1_3x1',384,384,3,1,s,s)
        C(n+'/b2_1x1',cin,448,1,1,s,s);C(n+'/b2_3x3',448,384,3,3,s,s);C(n+'/b2_1x3',384,384,1,3,s,s);C(n+'/b2_3x1',384,384,3,1,s,s)
        C(n+'/b3_1x1',cin,192,1,1,s,s); cin=2048
    fc(L,'Logits',2048,1000); return L
def resnet50():
    L=[];C=lambda n,ci,co,k,h,s=1: conv(L,n,ci,co,k,k,h,h,s,'same',1,False,2)
    C('conv1',3,64,7,224,2); h=56; cin=64
    for si,(w,nb) in enumerate(((64,3),(128,4),(256,6),(512,3))):
        for b in range(nb):
            st=2 if (b==0 and si>0) else 1; n=f'res{si+2}{chr(97+b)}'
            C(n+'_branch2a',cin,w,1,h,st); ho=math.ceil(h/st)
            C(n+'_branch2b',w,w,3,ho); C(n+'_branch2c',w,4*w,1,ho)
            if b==0: C(n+'_branch1',cin,4*w,1,h,st)
            h=ho; cin=4*w
    fc(L,'fc1000',2048,1000); return L


DEFAULT_BATCH = {"alexnet": 256, "googlenet": 256, "inception3": 128, "resnet50": 64}
BUILDERS = {"alexnet": alexnet, "googlenet": googlenet, "inception3": inception3, "resnet50": resnet50}


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "..", "data", "networks")
    os.makedirs(out_dir, exist_ok=True)
    for name, build in BUILDERS.items():
        layers = build()
        doc = {
            "name": name,
            "default_batch": DEFAULT_BATCH[name],
            "layers": [{"name": l["name"], "flops_per_sample": 6 * l["macs"], "params": l["params"]}
                       for l in layers],
        }
        with open(os.path.join(out_dir, name + ".json"), "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        macs = sum(l["macs"] for l in layers)
        params = sum(l["params"] for l in layers)
        print(f"{name}: {len(layers)} layers, {macs / 1e9:.4f} GMACs, {params / 1e6:.2f}M params")


if __name__ == "__main__":
    main()
