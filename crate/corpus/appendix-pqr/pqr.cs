pre p(a,_).
pre q(a,_).
pre r(_,_).
post p(a,c).
post q(a,a).
post q(a,a1).
post q(b,b).
post r(a,c).
post r(a1,c).
