// Generated word inventory for the synthetic text sampler.
#pragma once

namespace docmask::textdata {

inline constexpr const char* kWords[] = {
  "about","above","account","across","action","active","address","after","afterwards","again",
  "against","agency","agreement","all","almost","alone","along","already","also","although",
  "always","am","among","amongst","amoungst","amount","an","and","annual","another","answer","any",
  "anyhow","anyone","anything","anyway","anywhere","april","are","area","around","article","as",
  "at","august","author","back","balance","bank","batch","be","became","because","become",
  "becomes","becoming","been","before","beforehand","begin","behind","being","below","benefit",
  "beside","besides","between","beyond","bill","billing","board","both","bottom","branch","brand",
  "budget","building","business","but","buyer","by","call","can","cancel","cannot","cant",
  "capital","card","case","cash","category","center","chain","change","channel","chapter","charge",
  "check","city","claim","class","client","close","co","code","column","comment","commission",
  "company","complete","computer","con","condition","confirm","contact","content","contract",
  "control","copy","corner","correct","cost","could","couldnt","country","county","course","cover",
  "credit","cry","currency","current","customer","cycle","daily","damage","data","de","deal",
  "december","decision","default","degree","delivery","department","deposit","describe","design",
  "detail","device","digital","direct","discount","district","do","document","dollar","domain",
  "done","down","draft","driver","due","duration","during","duty","each","early","earning","east",
  "edition","effect","eg","eight","either","eleven","else","elsewhere","email","employee","empty",
  "end","energy","engine","enough","enter","entry","equipment","error","estimate","etc","even",
  "event","ever","every","everyone","everything","everywhere","except","exchange","expense",
  "export","express","factor","family","fax","feature","february","federal","fee","few","field",
  "fifteen","fifty","figure","file","fill","final","finance","find","fire","firm","first","fiscal",
  "five","floor","folder","follow","footer","for","force","forecast","form","format","former",
  "formerly","forty","forward","found","four","freight","friday","from","front","fuel","full",
  "fund","further","future","gain","gas","general","get","give","go","goods","grade","grand",
  "group","growth","guide","had","handle","has","hasnt","have","he","header","health","hence",
  "her","here","hereafter","hereby","herein","hereupon","hers","herself","him","himself","his",
  "history","holder","home","hour","house","how","however","hundred","ie","if","image","import",
  "in","inc","income","indeed","index","info","inside","install","insurance","interest","internal",
  "international","internet","into","inventory","invoice","is","issue","it","item","its","itself",
  "january","job","july","june","keep","key","kind","label","labor","land","lane","language",
  "large","last","late","latter","latterly","least","leave","ledger","legal","less","letter",
  "level","license","limit","line","link","list","load","local","location","logo","ltd","machine",
  "made","mail","main","manager","manual","many","march","margin","market","master","material",
  "may","me","meanwhile","measure","media","meeting","member","memo","menu","merchant","message",
  "meter","method","middle","might","mile","mill","mine","minute","mobile","model","monday",
  "money","month","more","moreover","most","mostly","motor","move","much","must","my","myself",
  "name","namely","neither","net","network","never","nevertheless","next","nine","no","nobody",
  "none","noone","nor","north","not","note","nothing","notice","november","now","nowhere","number",
  "object","october","of","off","offer","office","often","on","once","one","only","onto","open",
  "option","or","order","origin","other","others","otherwise","our","ours","ourselves","out",
  "outside","over","own","owner","pack","page","paid","panel","paper","parcel","part","partner",
  "party","payment","pending","per","percent","perhaps","period","permit","person","phone","piece",
  "place","plan","plant","please","point","policy","port","post","power","press","price","print",
  "prior","private","process","product","profile","profit","program","project","proof","property",
  "purchase","put","quality","quantity","quarter","query","question","queue","quote","rate",
  "rather","re","rebate","receipt","record","reference","refund","region","register","regular",
  "release","remark","rent","repair","report","request","reserve","result","retail","return",
  "revenue","review","road","room","route","row","safety","sale","same","sample","saturday",
  "schedule","scheme","school","score","screen","season","second","section","sector","secure",
  "see","seem","seemed","seeming","seems","segment","select","seller","senior","september",
  "serial","series","serious","server","service","session","settle","setup","several","share",
  "she","sheet","shift","ship","shop","should","show","side","signal","simple","since","sincere",
  "single","site","six","sixty","size","small","smart","so","social","software","some","somehow",
  "someone","something","sometime","sometimes","somewhere","source","south","space","speed",
  "spring","square","staff","stage","standard","start","state","station","status","still","stock",
  "storage","store","street","string","student","subject","submit","subtotal","such","summary",
  "sunday","supplier","supply","support","surface","switch","symbol","system","table","take",
  "target","task","tax","team","tech","ten","term","test","text","than","that","the","their",
  "them","themselves","then","thence","there","thereafter","thereby","therefore","therein",
  "thereupon","these","they","thick","thin","third","this","those","though","three","through",
  "throughout","thru","thursday","thus","ticket","tier","time","title","to","today","together",
  "token","too","tool","top","total","touch","toward","towards","track","trade","traffic","train",
  "transfer","transit","travel","trend","trip","truck","tuesday","turn","twelve","twenty","two",
  "type","un","under","union","unit","until","up","update","upgrade","upon","urban","us","usage",
  "user","utility","value","vehicle","vendor","version","very","via","video","view","visit",
  "voice","void","volume","voucher","wage","warehouse","was","watch","water","we","wednesday",
  "week","weight","well","were","west","what","whatever","wheel","when","whence","whenever",
  "where","whereafter","whereas","whereby","wherein","whereupon","wherever","whether","which",
  "while","whither","who","whoever","whole","whom","whose","why","will","window","winter","wire",
  "with","within","without","word","worker","would","year","yet","yield","you","your","yours",
  "yourself","yourselves","zone",
};
inline constexpr int kWordCount = 771;

}  // namespace docmask::textdata
